#pragma once

#include <string>
#include <vector>

#include "slafem/forward.hpp"
#include "slafem/inverse.hpp"
#include "slafem/loading_curve.hpp"
#include "slafem/ts_curve.hpp"

namespace slafem {

/// Full-precision, locale-free double formatting shared by all writers so
/// identical runs produce byte-identical files.
std::string format_double(double v);

void write_trace_csv(const std::vector<IdentEvent>& events, const std::string& path);
void write_events_csv(const std::vector<EventRecord>& events, const std::string& path);

/// Per-pass f_t / w_c / G_F table plus a row for the averaged curve.
void write_summary_csv(const std::vector<IdentTrace>& traces, const std::string& path);

/// Experimental polyline overlaid with the reproduced points; one small
/// marker per Case A event, one large terminus marker per pass.
void write_curve_svg(const LoadingCurve& record, const std::vector<IdentTrace>& traces,
                     const std::string& path);

/// Identified curves of all passes plus the average.
void write_ts_svg(const std::vector<IdentTrace>& traces, const std::string& path);

/// Writes ts_pass<N>.csv, ts_avg.csv, trace.csv, summary.csv and both SVG
/// plots into `dir` (created if missing).
void write_outputs(const std::string& dir, const LoadingCurve& record,
                   const std::vector<IdentTrace>& traces);

}  // namespace slafem
