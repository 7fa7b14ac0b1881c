#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slafem/fem.hpp"
#include "slafem/loading_curve.hpp"
#include "slafem/ts_curve.hpp"

namespace slafem {

/// Identification of the traction-separation curve from a loading record.
///
/// Every step solves the model under the reference load and scales by the
/// smaller of the global factor λ_g (ray through the current monitor pair
/// intersected with the record, ahead of a monotone arc-length cursor) and
/// the local factors λ_l = strength/σ of the non-lead path ips. λ = λ_g
/// (Case A) appends the lead ip's scaled state as a new curve point and
/// softens the lead; λ = λ_l (Case B) softens that follower and re-reads its
/// strength from the identified curve at its new secant.

struct IdentConfig {
  double dsigma_fraction = 0.01;  // stress decrement as a fraction of f_t
  double dsigma_abs = 0.0;        // absolute decrement in MPa; >0 overrides
  double k0 = 0.0;                // normal penalty, MPa/mm (required)
  double g0 = 0.0;                // shear penalty; 0 → 1e4·k0
  int max_events = 500000;
  std::uint64_t seed = 0;
  double cursor_tol_rel = 1e-9;   // of total normalized arc length
  double tie_tol = 1e-12;
  double ray_tol = 1e-9;          // on-ray tolerance, normalized coordinates

  // Largest stiff-side deviation (normalized monitor coordinates) a skipped
  // record vertex may have from the current loading ray. Secant stiffness
  // only ever decreases, so a measured state stiffer than the current ray by
  // more than this can never be matched and stops the analysis.
  double curve_match_tol = 0.02;

  void validate() const;  // throws std::invalid_argument
};

enum class CaseTag { A, B };

struct IdentEvent {
  int step = 0;
  CaseTag tag = CaseTag::A;
  double lambda = 0.0;
  int ip = -1;           // lead (A) or follower (B)
  double cursor = 0.0;   // normalized arc length after the event
  double control = 0.0;  // reproduced point, λ · monitor pair
  double response = 0.0;
  double k_after = 0.0;
  double strength_after = 0.0;
};

enum class StopReason {
  TsComplete,        // lead strength floored to zero
  CurveExhausted,    // cursor reached the end of the record
  UnreachableState,  // no intersection ahead although data remains
  NoTensileIp,
  MaxEvents,
};

std::string to_string(StopReason r);

struct IdentTrace {
  std::vector<IdentEvent> events;
  TsCurve ts;
  double f_t = 0.0;
  double dsigma = 0.0;
  int lead_ip = -1;
  StopReason reason = StopReason::MaxEvents;
  double cursor_end = 0.0;
  int case_a_count = 0;

  // Always-on property telemetry, checked by the test suites.
  double max_min_rule_violation = 0.0;      // λ − min(candidates), relative
  double max_admissibility_violation = 0.0; // (λσ − strength)/f_t over non-critical ips
  double max_reduction_ratio_error = 0.0;   // |k_new/k_old − (σ−Δσ)/σ|
  double max_skip_deviation = 0.0;          // stiff-side offset of skipped record states
  int ts_monotonicity_drops = 0;            // curve points rejected (w not increasing)
  int solve_count = 0;
};

struct RayHit {
  double lambda = 0.0;
  double s = 0.0;  // normalized arc length at the intersection
  std::array<double, 2> point{};  // raw coordinates
};

/// First intersection (in arc length, past the cursor) of the ray
/// {λ·(c, r), λ > 0} with the record's polyline. A stretch of the polyline
/// that lies on the ray counts as one hit at its far end. Returns nothing if
/// the ray never crosses ahead of the cursor.
std::optional<RayHit> global_load_factor(const std::array<double, 2>& ray,
                                         const LoadingCurve& record, double cursor,
                                         double ray_tol = 1e-9,
                                         double cursor_tol_rel = 1e-9);

/// strength/σ per eligible ip (σ > 0, not the lead, strength assigned).
/// Entries align with `sigma`; ineligible ips get no entry.
std::vector<std::pair<int, double>> local_load_factors(std::span<const double> sigma,
                                                       std::span<const double> strength,
                                                       std::span<const bool> has_strength,
                                                       int lead_ip);

/// One inverse pass over a record. `assigned` maps ip → already identified
/// curve for previous lead ips (multi-pass): those ips are ineligible as lead
/// and follow their own curve as Case B followers.
class InverseAnalysis {
 public:
  InverseAnalysis(const Mesh& mesh, std::vector<Material> materials,
                  const LoadingCurve& record, const IdentConfig& cfg,
                  std::map<int, TsCurve> assigned = {});

  /// Runs events until the tensile strength (the first curve point) is
  /// identified; with no assigned ips this is a single event.
  void run_step1();

  /// One event. Returns false once terminated.
  bool step();

  /// Steps to termination and returns the finished trace.
  IdentTrace run();

  bool terminated() const { return terminated_; }
  const IdentTrace& trace() const { return trace_; }
  bool f_t_identified() const { return f_t_identified_; }

 private:
  struct IpState {
    double k = 0.0;
    double strength = 0.0;
    bool has_strength = false;
    bool provisional = false;
    bool cracked = false;
    int assigned = -1;  // index into assigned_curves_, -1 = none
    double dsigma = 0.0;
  };

  void finish(StopReason reason);
  void reduce(int ip, double sigma_cr, bool is_lead);
  void refresh_provisional();

  FemModel model_;
  const LoadingCurve& record_;
  IdentConfig cfg_;
  std::vector<TsCurve> assigned_curves_;
  std::vector<IpState> ips_;
  std::vector<double> g_;
  std::mt19937_64 rng_;
  std::vector<std::array<double, 2>> ts_pts_;
  IdentTrace trace_;
  double cursor_ = 0.0;
  int lead_ = -1;
  bool f_t_identified_ = false;
  bool terminated_ = false;
  bool validated_ = false;
};

IdentTrace run_inverse(const Mesh& mesh, const std::vector<Material>& materials,
                       const LoadingCurve& record, const IdentConfig& cfg);

/// Repeated passes: pass p assigns the curves identified so far to their lead
/// ips and identifies a new curve from the next lead. Stops at max_passes,
/// when the record is exhausted, when a pass fails to complete its curve, or
/// when a pass makes no cursor progress.
std::vector<IdentTrace> run_multipass(const Mesh& mesh, const std::vector<Material>& materials,
                                      const LoadingCurve& record, const IdentConfig& cfg,
                                      int max_passes);

}  // namespace slafem
