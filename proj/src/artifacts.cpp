#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ipp/harness.hpp"

namespace ipp {

using nlohmann::json;

namespace {

// Shortest round-trip representation; locale independent.
std::string num(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("error writing " + path.string());
}

int gray(double v, double lo, double hi) {
    if (!(hi > lo)) return 0;
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<int>(std::lround(t * 255.0));
}

constexpr std::array<const char*, 10> kPalette = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                                  "#a65628", "#f781bf", "#17becf", "#bcbd22", "#ffff33"};

}  // namespace

void write_trace_csv(const RobotTrace& trace, std::ostream& out) {
    out << "step,x,y,realized_cost,reading\n";
    for (const auto& s : trace.steps) {
        out << s.step << ',' << s.loc.x << ',' << s.loc.y << ',' << num(s.realized_cost) << ',';
        if (s.reading) out << num(*s.reading);
        out << '\n';
    }
}

void write_pgm(const std::vector<double>& values, const GridSpec& grid, double lo, double hi, std::ostream& out) {
    out << "P2\n" << grid.width << ' ' << grid.height << "\n255\n";
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (x) out << ' ';
            out << gray(values[grid.index({x, y})], lo, hi);
        }
        out << '\n';
    }
}

json mission_json(const MissionResult& result) {
    json robots = json::array();
    for (const auto& r : result.robots) {
        int samples = 0;
        for (const auto& s : r.steps) samples += s.reading ? 1 : 0;
        robots.push_back({{"id", r.id},
                          {"start", {r.start.x, r.start.y}},
                          {"final", {r.final.x, r.final.y}},
                          {"status", status_name(r.status)},
                          {"initial_budget", r.initial_budget},
                          {"remaining_budget", r.remaining_budget},
                          {"steps", static_cast<int>(r.steps.size()) - 1},
                          {"samples", samples}});
    }
    return {{"method", method_name(result.method)},
            {"grid", {result.grid.width, result.grid.height}},
            {"mse", result.mse},
            {"mean_remaining_budget", result.mean_remaining_budget()},
            {"stranded", result.stranded_count()},
            {"observations", result.model.observations().size()},
            {"robots", robots}};
}

void emit_artifacts(const MissionResult& result, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw std::runtime_error("cannot create " + outdir.string() + ": " + ec.message());

    {
        const auto path = outdir / "metrics.json";
        auto out = open_out(path);
        out << mission_json(result).dump(2) << '\n';
        finish(out, path);
    }
    for (const auto& r : result.robots) {
        const auto path = outdir / ("robot_" + std::to_string(r.id) + ".csv");
        auto out = open_out(path);
        write_trace_csv(r, out);
        finish(out, path);
    }

    const auto [lo_it, hi_it] = std::minmax_element(result.truth.begin(), result.truth.end());
    const double lo = result.truth.empty() ? 0.0 : *lo_it;
    const double hi = result.truth.empty() ? 0.0 : *hi_it;
    for (const auto& [name, values] : {std::pair<const char*, const std::vector<double>*>{"truth.pgm", &result.truth},
                                       {"reconstruction.pgm", &result.reconstruction}}) {
        const auto path = outdir / name;
        auto out = open_out(path);
        write_pgm(*values, result.grid, lo, hi, out);
        finish(out, path);
    }

    const auto path = outdir / "paths.svg";
    auto out = open_out(path);
    constexpr int cell = 16;
    const auto& g = result.grid;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.width * cell << "\" height=\"" << g.height * cell
        << "\" viewBox=\"0 0 " << g.width * cell << ' ' << g.height * cell << "\">\n";
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            const int v = gray(result.truth[g.index({x, y})], lo, hi);
            out << "<rect x=\"" << x * cell << "\" y=\"" << y * cell << "\" width=\"" << cell << "\" height=\"" << cell
                << "\" fill=\"rgb(" << v << ',' << v << ',' << v << ")\"/>\n";
        }
    }
    for (const auto& r : result.robots) {
        const char* color = kPalette[static_cast<std::size_t>(r.id) % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < r.steps.size(); ++i) {
            if (i) out << ' ';
            out << r.steps[i].loc.x * cell + cell / 2 << ',' << r.steps[i].loc.y * cell + cell / 2;
        }
        out << "\"/>\n";
        for (const auto& s : r.steps) {
            if (!s.reading) continue;
            out << "<circle cx=\"" << s.loc.x * cell + cell / 2 << "\" cy=\"" << s.loc.y * cell + cell / 2
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
    }
    out << "</svg>\n";
    finish(out, path);
}

}  // namespace ipp
