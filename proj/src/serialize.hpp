#ifndef SMOOTHNET_SERIALIZE_HPP
#define SMOOTHNET_SERIALIZE_HPP

#include <charconv>
#include <string>
#include <system_error>

#include "analyzer.hpp"
#include "synth.hpp"

namespace smoothnet {

// Shortest round-trip decimal form of a double. Every file writer goes
// through this so repeated runs produce byte-identical artifacts.
inline std::string canonical_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) return "0";
    return std::string(buf, res.ptr);
}

// Network files carry the full parameter set plus the activation name:
// {"units":[{"w":[..],"b":..,"lambda":..,"kind":"logistic"}],"output_bias":..}
// Custom activations have no portable name and are refused.
std::string network_to_json(const TwoLayerNet& net);
TwoLayerNet network_from_json(const std::string& text);
void write_network_json(const std::string& path, const TwoLayerNet& net);
TwoLayerNet read_network_json(const std::string& path);

// Analysis reports list one entry per unit with its verdict and, when the
// scan found one, the zero-error position: "z" for one input, "line"
// ({"w":[..],"b0":..}) for several. The net supplies the line directions.
std::string report_to_json(const AnalysisReport& rep, const TwoLayerNet& net);
void write_report_json(const std::string& path, const AnalysisReport& rep,
                       const TwoLayerNet& net);

std::string build_report_to_json(const SplineBuildReport& rep);
void write_build_report_json(const std::string& path, const SplineBuildReport& rep);

// Long-format plot data, header kind,series,x,y: per-unit contribution
// curves on the scan grid (against x for one input, against the offset
// s = w.x for several) and one marker row per recovered zero-error point.
std::string plot_csv(const TwoLayerNet& net, const AnalysisReport& rep, double step = 0.01);
void write_plot_csv(const std::string& path, const TwoLayerNet& net, const AnalysisReport& rep,
                    double step = 0.01);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace smoothnet

#endif
