#include "slafem/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace slafem {

std::string format_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

void write_trace_csv(const std::vector<IdentEvent>& events, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "step,case,lambda,ip,cursor,control,response,k_after,strength_after\n";
  for (const IdentEvent& e : events) {
    out << e.step << "," << (e.tag == CaseTag::A ? "A" : "B") << ","
        << format_double(e.lambda) << "," << e.ip << "," << format_double(e.cursor) << ","
        << format_double(e.control) << "," << format_double(e.response) << ","
        << format_double(e.k_after) << "," << format_double(e.strength_after) << "\n";
  }
  close_out(out, path);
}

void write_events_csv(const std::vector<EventRecord>& events, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "step,ip,lambda,control,response,k_after,strength_after\n";
  for (const EventRecord& e : events) {
    out << e.step << "," << e.ip << "," << format_double(e.lambda) << ","
        << format_double(e.control) << "," << format_double(e.response) << ","
        << format_double(e.k_after) << "," << format_double(e.strength_after) << "\n";
  }
  close_out(out, path);
}

namespace {

// complete curves if any exist, otherwise everything with points
std::vector<TsCurve> curves_for_average(const std::vector<IdentTrace>& traces) {
  std::vector<TsCurve> complete, all;
  for (const IdentTrace& t : traces) {
    if (t.ts.empty()) continue;
    all.push_back(t.ts);
    if (t.ts.complete()) complete.push_back(t.ts);
  }
  return complete.empty() ? all : complete;
}

}  // namespace

void write_summary_csv(const std::vector<IdentTrace>& traces, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "pass,lead_ip,f_t_MPa,w_c_mm,G_F_N_per_mm,energy_lower_bound,events,case_a,"
         "solves,reason\n";
  for (std::size_t p = 0; p < traces.size(); ++p) {
    const IdentTrace& t = traces[p];
    const FractureEnergy e = t.ts.empty() ? FractureEnergy{0.0, true} : fracture_energy(t.ts);
    const double w_c = t.ts.empty() ? 0.0 : t.ts.w_last();
    out << (p + 1) << "," << t.lead_ip << "," << format_double(t.f_t) << ","
        << format_double(w_c) << "," << format_double(e.value) << ","
        << (e.lower_bound ? 1 : 0) << "," << t.events.size() << "," << t.case_a_count << ","
        << t.solve_count << "," << to_string(t.reason) << "\n";
  }
  const std::vector<TsCurve> avg_in = curves_for_average(traces);
  if (!avg_in.empty()) {
    const TsCurve avg = average_ts(avg_in);
    const FractureEnergy e = fracture_energy(avg);
    out << "average,," << format_double(avg.f_t()) << "," << format_double(avg.w_last())
        << "," << format_double(e.value) << "," << (e.lower_bound ? 1 : 0) << ",,,,\n";
  }
  close_out(out, path);
}

namespace {

struct PlotBox {
  double x0 = 60, y0 = 20, w = 540, h = 400;  // svg plot area
  double xmax = 1, ymax = 1;                  // data extents (from zero)

  double px(double x) const { return x0 + (x / xmax) * w; }
  double py(double y) const { return y0 + h - (y / ymax) * h; }
};

void svg_header(std::ofstream& out, const PlotBox& b, const std::string& xlabel,
                const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"470\" "
         "viewBox=\"0 0 640 470\">\n";
  out << "<rect width=\"640\" height=\"470\" fill=\"white\"/>\n";
  out << "<rect x=\"" << b.x0 << "\" y=\"" << b.y0 << "\" width=\"" << b.w << "\" height=\""
      << b.h << "\" fill=\"none\" stroke=\"#999\"/>\n";
  out << "<text x=\"" << b.x0 + b.w / 2 << "\" y=\"455\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">"
      << xlabel << "</text>\n";
  out << "<text x=\"15\" y=\"" << b.y0 + b.h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 15 "
      << b.y0 + b.h / 2 << ")\">" << ylabel << "</text>\n";
  // extent ticks
  out << "<text x=\"" << b.x0 + b.w << "\" y=\"440\" text-anchor=\"end\" "
         "font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(b.xmax) << "</text>\n";
  out << "<text x=\"" << b.x0 - 5 << "\" y=\"" << b.y0 + 10
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_double(b.ymax) << "</text>\n";
}

const char* pass_color(std::size_t pass) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
  return colors[pass % 5];
}

}  // namespace

void write_curve_svg(const LoadingCurve& record, const std::vector<IdentTrace>& traces,
                     const std::string& path) {
  PlotBox b;
  b.xmax = 1e-300;
  b.ymax = 1e-300;
  for (const auto& p : record.points()) {
    b.ymax = std::max(b.ymax, p[0]);  // control on the vertical axis
    b.xmax = std::max(b.xmax, p[1]);
  }
  for (const IdentTrace& t : traces) {
    for (const IdentEvent& e : t.events) {
      if (e.tag != CaseTag::A) continue;
      b.ymax = std::max(b.ymax, e.control);
      b.xmax = std::max(b.xmax, e.response);
    }
  }

  std::ofstream out = open_out(path);
  svg_header(out, b, "response", "control");

  out << "<polyline fill=\"none\" stroke=\"#333\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : record.points()) {
    out << format_double(b.px(p[1])) << "," << format_double(b.py(p[0])) << " ";
  }
  out << "\"/>\n";

  for (std::size_t t = 0; t < traces.size(); ++t) {
    const char* color = pass_color(t);
    const IdentEvent* last_a = nullptr;
    for (const IdentEvent& e : traces[t].events) {
      if (e.tag != CaseTag::A) continue;
      last_a = &e;
      out << "<circle cx=\"" << format_double(b.px(e.response)) << "\" cy=\""
          << format_double(b.py(e.control)) << "\" r=\"2\" fill=\"" << color << "\"/>\n";
    }
    if (last_a) {  // terminus of this pass
      out << "<circle cx=\"" << format_double(b.px(last_a->response)) << "\" cy=\""
          << format_double(b.py(last_a->control)) << "\" r=\"6\" fill=\"none\" stroke=\""
          << color << "\" stroke-width=\"2\"/>\n";
    }
  }
  out << "</svg>\n";
  close_out(out, path);
}

void write_ts_svg(const std::vector<IdentTrace>& traces, const std::string& path) {
  PlotBox b;
  b.xmax = 1e-300;
  b.ymax = 1e-300;
  std::vector<const TsCurve*> curves;
  for (const IdentTrace& t : traces) {
    if (t.ts.empty()) continue;
    curves.push_back(&t.ts);
    b.xmax = std::max(b.xmax, t.ts.w_last());
    for (const auto& p : t.ts.points()) b.ymax = std::max(b.ymax, p[1]);
  }

  std::ofstream out = open_out(path);
  svg_header(out, b, "opening w (mm)", "stress (MPa)");
  for (std::size_t t = 0; t < curves.size(); ++t) {
    out << "<polyline fill=\"none\" stroke=\"" << pass_color(t)
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : curves[t]->points()) {
      out << format_double(b.px(p[0])) << "," << format_double(b.py(p[1])) << " ";
    }
    out << "\"/>\n";
  }
  const std::vector<TsCurve> avg_in = curves_for_average(traces);
  if (avg_in.size() > 1) {
    const TsCurve avg = average_ts(avg_in);
    out << "<polyline fill=\"none\" stroke=\"#000\" stroke-width=\"2\" "
           "stroke-dasharray=\"6 4\" points=\"";
    for (const auto& p : avg.points()) {
      out << format_double(b.px(p[0])) << "," << format_double(b.py(p[1])) << " ";
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  close_out(out, path);
}

void write_outputs(const std::string& dir, const LoadingCurve& record,
                   const std::vector<IdentTrace>& traces) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);

  std::vector<IdentEvent> all_events;
  for (std::size_t p = 0; p < traces.size(); ++p) {
    const IdentTrace& t = traces[p];
    if (!t.ts.empty()) {
      write_ts_csv(t.ts, (base / ("ts_pass" + std::to_string(p + 1) + ".csv")).string());
    }
    all_events.insert(all_events.end(), t.events.begin(), t.events.end());
  }
  const std::vector<TsCurve> avg_in = curves_for_average(traces);
  if (!avg_in.empty()) {
    write_ts_csv(average_ts(avg_in), (base / "ts_avg.csv").string());
  }
  write_trace_csv(all_events, (base / "trace.csv").string());
  write_summary_csv(traces, (base / "summary.csv").string());
  write_curve_svg(record, traces, (base / "curve.svg").string());
  write_ts_svg(traces, (base / "ts.svg").string());
}

}  // namespace slafem
