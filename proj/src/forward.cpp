#include "slafem/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace slafem {

std::optional<std::pair<int, double>> critical_event(std::span<const double> sigma,
                                                     std::span<const double> strength,
                                                     std::mt19937_64& rng, double tie_tol) {
  if (sigma.size() != strength.size()) {
    throw std::invalid_argument("sigma and strength spans differ in size");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) continue;
    best = std::min(best, strength[i] / sigma[i]);
  }
  if (!std::isfinite(best)) return std::nullopt;

  std::vector<int> ties;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0)) continue;
    if (strength[i] / sigma[i] <= best * (1.0 + tie_tol)) ties.push_back(static_cast<int>(i));
  }
  int ip = ties.front();
  if (ties.size() > 1) {
    std::uniform_int_distribution<std::size_t> draw(0, ties.size() - 1);
    ip = ties[draw(rng)];
  }
  return std::make_pair(ip, strength[ip] / sigma[ip]);
}

ForwardResult run_forward(const Mesh& mesh, const std::vector<Material>& materials,
                          const std::vector<SawtoothLaw>& laws, const ForwardConfig& cfg) {
  FemModel model(mesh, materials);
  const int nip = model.interface_ip_count();
  if (static_cast<int>(laws.size()) != nip) {
    throw std::invalid_argument("one saw-tooth law per interface integration point required");
  }
  if (nip == 0) throw std::invalid_argument("mesh has no interface elements");
  for (const SawtoothLaw& law : laws) law.validate();

  std::vector<std::size_t> tooth(nip, 0);
  std::vector<double> k(nip), strength(nip), g(nip), masked(nip);
  for (int i = 0; i < nip; ++i) {
    k[i] = laws[i].teeth.front().k;
    strength[i] = laws[i].teeth.front().strength;
    g[i] = cfg.g0 > 0.0 ? cfg.g0 : 1e4 * laws[i].k0();
  }

  std::mt19937_64 rng(cfg.seed);
  ForwardResult result;
  result.termination = "max_events";

  for (int step = 0; step < cfg.max_events; ++step) {
    const SolveResult res = model.solve(k, g, 1.0);
    const std::vector<IpKinematics> state = model.interface_state(res.u, k, g);
    for (int i = 0; i < nip; ++i) {
      // fully cracked points carry no strength and cannot fail again
      masked[i] = strength[i] > 0.0 ? state[i].sigma : -1.0;
    }
    const auto crit = critical_event(masked, strength, rng, cfg.tie_tol);
    if (!crit) {
      bool all_cracked = true;
      for (int i = 0; i < nip; ++i) all_cracked = all_cracked && strength[i] == 0.0;
      result.termination = all_cracked ? "all_cracked" : "no_tensile_ip";
      break;
    }
    const auto [ip, lambda] = *crit;

    // advance the failing point to its next tooth
    tooth[ip] = std::min(tooth[ip] + 1, laws[ip].teeth.size() - 1);
    k[ip] = laws[ip].teeth[tooth[ip]].k;
    strength[ip] = laws[ip].teeth[tooth[ip]].strength;

    EventRecord ev;
    ev.step = step;
    ev.ip = ip;
    ev.lambda = lambda;
    ev.control = lambda * res.control;
    ev.response = lambda * res.response;
    ev.k_after = k[ip];
    ev.strength_after = strength[ip];
    result.events.push_back(ev);
    result.curve.push_back({ev.control, ev.response});

    if (std::abs(ev.response) >= cfg.response_limit) {
      result.termination = "response_limit";
      break;
    }
    if (std::abs(ev.control) >= cfg.control_limit) {
      result.termination = "control_limit";
      break;
    }
  }
  return result;
}

ForwardResult run_forward(const Mesh& mesh, const std::vector<Material>& materials,
                          const SawtoothLaw& law, const ForwardConfig& cfg) {
  const int nip = mesh.interface_ip_count();
  return run_forward(mesh, materials, std::vector<SawtoothLaw>(nip, law), cfg);
}

}  // namespace slafem
