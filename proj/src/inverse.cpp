#include "slafem/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "slafem/sawtooth.hpp"

namespace slafem {

void IdentConfig::validate() const {
  if (!(k0 > 0.0)) throw std::invalid_argument("normal penalty k0 must be positive");
  if (dsigma_abs < 0.0) throw std::invalid_argument("stress decrement must be non-negative");
  if (dsigma_abs == 0.0 && !(dsigma_fraction > 0.0 && dsigma_fraction < 1.0)) {
    throw std::invalid_argument("stress decrement fraction must lie in (0, 1)");
  }
  if (g0 < 0.0) throw std::invalid_argument("shear penalty must be non-negative");
  if (max_events <= 0) throw std::invalid_argument("event budget must be positive");
  if (!(cursor_tol_rel > 0.0) || !(tie_tol > 0.0) || !(ray_tol > 0.0) ||
      !(curve_match_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::TsComplete: return "ts_complete";
    case StopReason::CurveExhausted: return "curve_exhausted";
    case StopReason::UnreachableState: return "unreachable_state";
    case StopReason::NoTensileIp: return "no_tensile_ip";
    case StopReason::MaxEvents: return "max_events";
  }
  return "unknown";
}

std::optional<RayHit> global_load_factor(const std::array<double, 2>& ray,
                                         const LoadingCurve& record, double cursor,
                                         double ray_tol, double cursor_tol_rel) {
  const std::size_t n = record.size();
  if (n < 2) return std::nullopt;
  const double dx = ray[0] / record.control_max();
  const double dy = ray[1] / record.response_max();
  const double dlen = std::hypot(dx, dy);
  if (!(dlen > 0.0)) return std::nullopt;
  const double ux = dx / dlen, uy = dy / dlen;

  const double arc_tol = cursor_tol_rel * record.total_length();
  const auto& arc = record.arc();

  struct Candidate {
    double lambda, s;
    std::array<double, 2> point;
  };
  std::optional<Candidate> pending;  // far end of a stretch lying on the ray

  auto accept = [&](const Candidate& c) { return c.lambda > 0.0 && c.s > cursor + arc_tol; };
  auto raw_at = [&](double t, std::size_t i) -> std::array<double, 2> {
    const auto& p0 = record.points()[i];
    const auto& p1 = record.points()[i + 1];
    return {p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])};
  };

  // seed with the first vertex so a record starting on the ray is covered
  {
    const auto p0 = record.normalized(0);
    const double c0 = ux * p0[1] - uy * p0[0];
    const double d0 = ux * p0[0] + uy * p0[1];
    if (std::abs(c0) <= ray_tol && d0 > ray_tol) {
      pending = Candidate{d0 / dlen, arc[0], record.points()[0]};
    }
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto p0 = record.normalized(i);
    const auto p1 = record.normalized(i + 1);
    const double c0 = ux * p0[1] - uy * p0[0];
    const double c1 = ux * p1[1] - uy * p1[0];
    const bool on1 = std::abs(c1) <= ray_tol;

    if (on1) {
      // ray touches (or keeps touching) the record: extend the stretch to the
      // far end and keep scanning; only the far end counts as the hit
      const double d1 = ux * p1[0] + uy * p1[1];
      if (d1 > ray_tol) {
        pending = Candidate{d1 / dlen, arc[i + 1], record.points()[i + 1]};
      } else {
        pending.reset();
      }
      continue;
    }
    if (pending) {  // stretch ended at p0
      if (accept(*pending)) return RayHit{pending->lambda, pending->s, pending->point};
      pending.reset();
    }
    if (std::abs(c0) <= ray_tol) continue;  // crossing at the vertex, handled above
    if ((c0 < 0.0) == (c1 < 0.0)) continue;

    const double t = c0 / (c0 - c1);
    const double lam_n = ux * (p0[0] + t * (p1[0] - p0[0])) + uy * (p0[1] + t * (p1[1] - p0[1]));
    const double s = arc[i] + t * (arc[i + 1] - arc[i]);
    const Candidate c{lam_n / dlen, s, raw_at(t, i)};
    if (accept(c)) return RayHit{c.lambda, c.s, c.point};
  }
  if (pending && accept(*pending)) return RayHit{pending->lambda, pending->s, pending->point};
  return std::nullopt;
}

namespace {

/// True when some record vertex past the cursor lies on the compliant side of
/// the elastic ray - state the model could still reach by softening further.
/// Remaining data below the ray is stiffer than the model can ever be again,
/// so the usable part of the record is exhausted.
bool record_demands_softening(const LoadingCurve& record, double cursor,
                              const std::array<double, 2>& ray, double ray_tol,
                              double cursor_tol_rel) {
  const double dx = ray[0] / record.control_max();
  const double dy = ray[1] / record.response_max();
  const double dlen = std::hypot(dx, dy);
  if (!(dlen > 0.0)) return true;  // degenerate state: nothing is reachable
  const double ux = dx / dlen, uy = dy / dlen;
  const double arc_tol = cursor_tol_rel * record.total_length();
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (record.arc()[i] <= cursor + arc_tol) continue;
    const auto p = record.normalized(i);
    if (ux * p[1] - uy * p[0] > ray_tol) return true;
  }
  return false;
}

/// Largest stiff-side offset (normalized coordinates, perpendicular to the
/// current loading ray) among record vertices between the cursor and the
/// accepted hit. Such states were measured but can never be matched once
/// skipped: the secant only softens, so every later ray is more compliant
/// still. Event oscillation and step-size mismatch poke a little past each
/// ray; a hardening branch steeper than the secant stiffness overshoots it
/// decisively.
double stiff_skip_deviation(const LoadingCurve& record, double cursor, double s_hit,
                            const std::array<double, 2>& ray) {
  const double dx = ray[0] / record.control_max();
  const double dy = ray[1] / record.response_max();
  const double dlen = std::hypot(dx, dy);
  if (!(dlen > 0.0)) return 0.0;
  const double ux = dx / dlen, uy = dy / dlen;
  const auto& arc = record.arc();
  double dev = 0.0;
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (arc[i] <= cursor || arc[i] >= s_hit) continue;
    const auto p = record.normalized(i);
    dev = std::max(dev, uy * p[0] - ux * p[1]);
  }
  return dev;
}

}  // namespace

std::vector<std::pair<int, double>> local_load_factors(std::span<const double> sigma,
                                                       std::span<const double> strength,
                                                       std::span<const bool> has_strength,
                                                       int lead_ip) {
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (static_cast<int>(i) == lead_ip) continue;
    if (!has_strength[i]) continue;
    if (!(sigma[i] > 0.0)) continue;
    out.emplace_back(static_cast<int>(i), strength[i] / sigma[i]);
  }
  return out;
}

InverseAnalysis::InverseAnalysis(const Mesh& mesh, std::vector<Material> materials,
                                 const LoadingCurve& record, const IdentConfig& cfg,
                                 std::map<int, TsCurve> assigned)
    : model_(mesh, std::move(materials)), record_(record), cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  if (record_.size() < 2) throw std::invalid_argument("loading record needs at least two points");
  const int nip = model_.interface_ip_count();
  if (nip == 0) throw std::invalid_argument("mesh has no interface elements");

  const double g0 = cfg_.g0 > 0.0 ? cfg_.g0 : 1e4 * cfg_.k0;
  g_.assign(nip, g0);
  ips_.resize(nip);
  for (IpState& ip : ips_) ip.k = cfg_.k0;

  for (auto& [ip, curve] : assigned) {
    if (ip < 0 || ip >= nip) throw std::invalid_argument("assigned curve on a missing ip");
    if (!curve.complete()) {
      throw std::invalid_argument("assigned curves must be complete (end at zero stress)");
    }
    IpState& st = ips_[ip];
    st.assigned = static_cast<int>(assigned_curves_.size());
    st.has_strength = true;
    // at the initial penalty the secant meets the curve at its first point
    st.strength = ts_strength_at_secant(curve, st.k).sigma;
    st.dsigma = cfg_.dsigma_abs > 0.0 ? cfg_.dsigma_abs : cfg_.dsigma_fraction * curve.f_t();
    assigned_curves_.push_back(std::move(curve));
  }
}

void InverseAnalysis::finish(StopReason reason) {
  terminated_ = true;
  trace_.reason = reason;
  trace_.cursor_end = cursor_;
  trace_.lead_ip = lead_;
  if (!ts_pts_.empty()) trace_.ts = TsCurve(ts_pts_, TsCurve::Provenance::Identified);
}

void InverseAnalysis::reduce(int ip, double sigma_cr, bool is_lead) {
  IpState& st = ips_[ip];
  const double dsig = st.dsigma;
  const double k_old = st.k;

  if (sigma_cr <= dsig) {
    // the decrement crosses zero: the point separates completely
    st.cracked = true;
    st.provisional = false;
    st.k = kResidualStiffnessFraction * cfg_.k0;
    st.strength = 0.0;
    st.has_strength = true;
    if (is_lead) {
      // close the curve by extrapolating the last interval to zero stress
      const double w_m = ts_pts_.back()[0];
      const double w_prev = ts_pts_.size() > 1 ? ts_pts_[ts_pts_.size() - 2][0] : 0.0;
      double w_c = w_m + (w_m - w_prev);
      if (!(w_c > w_m)) w_c = w_m * (1.0 + 1e-9) + 1e-300;
      ts_pts_.push_back({w_c, 0.0});
    }
    return;
  }

  const double omega = (sigma_cr - dsig) / sigma_cr;
  st.k = omega * k_old;
  trace_.max_reduction_ratio_error =
      std::max(trace_.max_reduction_ratio_error, std::abs(st.k / k_old - omega));

  if (is_lead) {
    st.strength = sigma_cr - dsig;  // stress level right after the drop
    st.has_strength = true;
  } else {
    // follower: its next strength is where the new secant meets its curve
    const SecantHit hit =
        st.assigned >= 0 ? ts_strength_at_secant(assigned_curves_[st.assigned], st.k)
                         : ts_strength_at_secant(std::span(std::as_const(ts_pts_)), st.k);
    st.strength = hit.sigma;
    st.provisional = hit.provisional;
    st.has_strength = true;
  }
}

void InverseAnalysis::refresh_provisional() {
  for (IpState& st : ips_) {
    if (!st.provisional || st.cracked) continue;
    const SecantHit hit = st.assigned >= 0
                              ? ts_strength_at_secant(assigned_curves_[st.assigned], st.k)
                              : ts_strength_at_secant(std::span(std::as_const(ts_pts_)), st.k);
    st.strength = hit.sigma;
    st.provisional = hit.provisional;
  }
}

bool InverseAnalysis::step() {
  if (terminated_) return false;
  if (static_cast<int>(trace_.events.size()) >= cfg_.max_events) {
    finish(StopReason::MaxEvents);
    return false;
  }

  const int nip = model_.interface_ip_count();
  std::vector<double> k(nip), strength(nip);
  for (int i = 0; i < nip; ++i) {
    k[i] = ips_[i].k;
    strength[i] = ips_[i].strength;
  }

  const SolveResult res = model_.solve(k, g_, 1.0);
  ++trace_.solve_count;
  const std::vector<IpKinematics> state = model_.interface_state(res.u, k, g_);

  std::vector<double> sigma(nip);
  const std::unique_ptr<bool[]> eligible(new bool[nip]);
  bool any_tension = false;
  for (int i = 0; i < nip; ++i) {
    sigma[i] = ips_[i].cracked ? -1.0 : state[i].sigma;  // cracked points never fail again
    eligible[i] = ips_[i].has_strength && !ips_[i].cracked;
    any_tension = any_tension || sigma[i] > 0.0;
  }

  const std::array<double, 2> ray{res.control, res.response};
  const auto global =
      global_load_factor(ray, record_, cursor_, cfg_.ray_tol, cfg_.cursor_tol_rel);

  const auto locals = local_load_factors(
      sigma, strength, std::span<const bool>(eligible.get(), nip), lead_);
  double local_min = std::numeric_limits<double>::infinity();
  int local_ip = -1;
  for (const auto& [ip, lam] : locals) {
    if (lam < local_min) {
      local_min = lam;
      local_ip = ip;
    }
  }

  if (!global && local_ip < 0) {
    if (!any_tension) {
      finish(StopReason::NoTensileIp);
    } else if (cursor_ >= record_.total_length() * (1.0 - cfg_.cursor_tol_rel) ||
               (f_t_identified_ &&
                !record_demands_softening(record_, cursor_, ray, cfg_.ray_tol,
                                          cfg_.cursor_tol_rel))) {
      // either the cursor sits at the end, or what remains lies below the
      // current elastic line: a record that simply stopped mid-softening
      finish(StopReason::CurveExhausted);
    } else {
      finish(StopReason::UnreachableState);
    }
    return false;
  }

  // the scaled state must not overshoot any candidate: λ = min of them all
  const bool case_a = global && (local_ip < 0 || global->lambda < local_min);
  const double lambda = case_a ? global->lambda : local_min;
  {
    double overall = std::min(local_min, global ? global->lambda : local_min);
    if (std::isfinite(overall) && overall > 0.0) {
      trace_.max_min_rule_violation =
          std::max(trace_.max_min_rule_violation, (lambda - overall) / overall);
    }
  }

  IdentEvent ev;
  ev.step = static_cast<int>(trace_.events.size());
  ev.lambda = lambda;
  ev.control = lambda * res.control;
  ev.response = lambda * res.response;

  // admissibility telemetry: at the chosen λ no bystander may exceed its
  // strength (evaluated before this event changes any state)
  auto note_admissibility = [&](int event_ip) {
    const double f_ref = trace_.f_t > 0.0 ? trace_.f_t : 1.0;
    for (int i = 0; i < nip; ++i) {
      if (i == event_ip || i == lead_ || !eligible[i] || !(sigma[i] > 0.0)) continue;
      trace_.max_admissibility_violation =
          std::max(trace_.max_admissibility_violation,
                   (lambda * sigma[i] - ips_[i].strength) / f_ref);
    }
  };

  if (case_a) {
    // a hit that would skip measured states far on the stiff side of the
    // current ray cannot be part of a faithful reproduction: those states are
    // forever out of reach once the secant has softened this far. (Before the
    // tensile strength is identified the model may legitimately be softer
    // than the record, so the first event is exempt.)
    if (f_t_identified_) {
      const double dev = stiff_skip_deviation(record_, cursor_, global->s, ray);
      trace_.max_skip_deviation = std::max(trace_.max_skip_deviation, dev);
      if (dev > cfg_.curve_match_tol) {
        finish(StopReason::UnreachableState);
        return false;
      }
    }

    int lead = lead_;
    if (!f_t_identified_) {
      // the first reproduced point fixes the tensile strength: the new lead is
      // the unassigned point closest to failure (highest stress; ties drawn)
      double best = 0.0;
      for (int i = 0; i < nip; ++i) {
        if (ips_[i].assigned >= 0 || ips_[i].cracked) continue;
        best = std::max(best, sigma[i]);
      }
      if (!(best > 0.0)) {
        finish(StopReason::NoTensileIp);
        return false;
      }
      std::vector<int> ties;
      for (int i = 0; i < nip; ++i) {
        if (ips_[i].assigned >= 0 || ips_[i].cracked || !(sigma[i] > 0.0)) continue;
        if (sigma[i] >= best * (1.0 - cfg_.tie_tol)) ties.push_back(i);
      }
      lead = ties.front();
      if (ties.size() > 1) {
        std::uniform_int_distribution<std::size_t> draw(0, ties.size() - 1);
        lead = ties[draw(rng_)];
      }
      lead_ = lead;

      const double f_t = lambda * sigma[lead];
      trace_.f_t = f_t;
      trace_.dsigma = cfg_.dsigma_abs > 0.0 ? cfg_.dsigma_abs : cfg_.dsigma_fraction * f_t;
      // every unassigned point on the path shares the identified strength
      for (int i = 0; i < nip; ++i) {
        if (ips_[i].assigned >= 0 || ips_[i].cracked || i == lead) continue;
        ips_[i].strength = f_t;
        ips_[i].has_strength = true;
        ips_[i].dsigma = trace_.dsigma;
      }
      ips_[lead].dsigma = trace_.dsigma;
      f_t_identified_ = true;
    }

    if (!(sigma[lead] > 0.0)) {
      // the record asks for more while the softening point is not in tension
      finish(StopReason::UnreachableState);
      return false;
    }

    const double w_new = lambda * state[lead].w;
    const double sigma_cr = lambda * sigma[lead];
    if (!ts_pts_.empty() && w_new <= ts_pts_.back()[0]) {
      ++trace_.ts_monotonicity_drops;  // redundant point, curve keeps its footing
    } else {
      ts_pts_.push_back({w_new, sigma_cr});
    }

    note_admissibility(lead);
    reduce(lead, sigma_cr, true);
    cursor_ = global->s;
    ++trace_.case_a_count;

    ev.tag = CaseTag::A;
    ev.ip = lead;
    ev.cursor = cursor_;
    ev.k_after = ips_[lead].k;
    ev.strength_after = ips_[lead].strength;
    trace_.events.push_back(ev);

    refresh_provisional();  // frontier-pinned followers see the longer curve

    if (ips_[lead].cracked) {
      finish(StopReason::TsComplete);
      return false;
    }
    if (cursor_ >= record_.total_length() * (1.0 - cfg_.cursor_tol_rel)) {
      finish(StopReason::CurveExhausted);
      return false;
    }
    return true;
  }

  // Case B: a follower reaches its strength before the record point
  {
    note_admissibility(local_ip);
    reduce(local_ip, ips_[local_ip].strength, false);

    ev.tag = CaseTag::B;
    ev.ip = local_ip;
    ev.cursor = cursor_;  // followers do not consume the record
    ev.k_after = ips_[local_ip].k;
    ev.strength_after = ips_[local_ip].strength;
    trace_.events.push_back(ev);
    return true;
  }
}

void InverseAnalysis::run_step1() {
  while (!f_t_identified_ && step()) {
  }
}

IdentTrace InverseAnalysis::run() {
  while (step()) {
  }
  return trace_;
}

IdentTrace run_inverse(const Mesh& mesh, const std::vector<Material>& materials,
                       const LoadingCurve& record, const IdentConfig& cfg) {
  InverseAnalysis inv(mesh, materials, record, cfg);
  return inv.run();
}

std::vector<IdentTrace> run_multipass(const Mesh& mesh, const std::vector<Material>& materials,
                                      const LoadingCurve& record, const IdentConfig& cfg,
                                      int max_passes) {
  if (max_passes < 1) throw std::invalid_argument("at least one pass required");
  std::vector<IdentTrace> traces;
  std::map<int, TsCurve> assigned;
  double prev_cursor = 0.0;
  const double tol = cfg.cursor_tol_rel * record.total_length();

  for (int pass = 0; pass < max_passes; ++pass) {
    InverseAnalysis inv(mesh, materials, record, cfg, assigned);
    IdentTrace trace = inv.run();
    const bool complete = trace.reason == StopReason::TsComplete;
    const double cursor_end = trace.cursor_end;
    const int lead = trace.lead_ip;
    const TsCurve ts = trace.ts;
    traces.push_back(std::move(trace));

    if (!complete) break;                                    // curve unfinished: stop
    if (cursor_end >= record.total_length() - tol) break;    // record exhausted
    if (pass > 0 && cursor_end <= prev_cursor + tol) break;  // no new data explained
    prev_cursor = cursor_end;
    assigned[lead] = ts;
  }
  return traces;
}

}  // namespace slafem
