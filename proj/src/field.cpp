#include "ipp/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "ipp/errors.hpp"

namespace ipp {

namespace {

std::string describe(Location l) {
    return "(" + std::to_string(l.x) + "," + std::to_string(l.y) + ")";
}

void require_inside(const GridSpec& grid, Location loc) {
    if (!grid.contains(loc)) {
        throw DomainError("location " + describe(loc) + " outside " + std::to_string(grid.width) + "x" +
                          std::to_string(grid.height) + " grid");
    }
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

MixtureField::MixtureField(GridSpec grid, std::vector<GaussianComponent> components)
    : grid_(grid), components_(std::move(components)) {
    if (components_.empty()) throw ParameterError("mixture field needs at least one component");
    for (const auto& c : components_) {
        if (!(c.spread > 0.0)) throw ParameterError("mixture component spread must be > 0");
        if (!std::isfinite(c.amplitude) || !std::isfinite(c.cx) || !std::isfinite(c.cy)) {
            throw ParameterError("mixture component has non-finite parameters");
        }
    }
}

double MixtureField::value(Location loc) const {
    require_inside(grid_, loc);
    double sum = 0.0;
    for (const auto& c : components_) {
        const double dx = loc.x - c.cx;
        const double dy = loc.y - c.cy;
        sum += c.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * c.spread * c.spread));
    }
    return sum;
}

GridField::GridField(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) {
        throw ParameterError("raster has " + std::to_string(values_.size()) + " values, grid needs " +
                             std::to_string(grid_.cell_count()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ParameterError("raster values must be finite");
    }
}

double GridField::value(Location loc) const {
    require_inside(grid_, loc);
    return values_[grid_.index(loc)];
}

const GridSpec& field_grid(const Field& field) {
    return std::visit([](const auto& f) -> const GridSpec& { return f.grid(); }, field);
}

double eval_field(const Field& field, Location loc) {
    return std::visit([loc](const auto& f) { return f.value(loc); }, field);
}

std::vector<double> field_values(const Field& field) {
    const auto& grid = field_grid(field);
    std::vector<double> out(grid.cell_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_field(field, grid.at(i));
    return out;
}

double sample_measurement(const Field& field, Location loc, double noise_sd, Rng& rng) {
    if (!(noise_sd >= 0.0)) throw ParameterError("noise_sd must be >= 0");
    const double truth = eval_field(field, loc);
    if (noise_sd == 0.0) return truth;
    std::normal_distribution<double> noise(0.0, noise_sd);
    return truth + noise(rng);
}

GridField load_grid_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open raster " + path.string(), 0);
    return parse_grid_field(in);
}

GridField parse_grid_field(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line) != "x,y,value") throw FormatError("expected header 'x,y,value'", line_no);

    struct Row {
        int x, y;
        double v;
        std::size_t line;
    };
    std::vector<Row> rows;
    int max_x = -1, max_y = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string part;
        while (std::getline(ss, part, ',')) parts.push_back(trim(part));
        if (parts.size() != 3) throw FormatError("expected 3 columns", line_no);

        Row row{0, 0, 0.0, line_no};
        auto parse_int = [&](const std::string& s, int& out) {
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc{} || p != s.data() + s.size() || out < 0) {
                throw FormatError("bad cell coordinate '" + s + "'", line_no);
            }
        };
        parse_int(parts[0], row.x);
        parse_int(parts[1], row.y);
        char* end = nullptr;
        row.v = std::strtod(parts[2].c_str(), &end);
        if (parts[2].empty() || end != parts[2].c_str() + parts[2].size() || !std::isfinite(row.v)) {
            throw FormatError("non-numeric value '" + parts[2] + "'", line_no);
        }
        max_x = std::max(max_x, row.x);
        max_y = std::max(max_y, row.y);
        rows.push_back(row);
    }
    if (rows.empty()) throw FormatError("raster has no cells", line_no);
    if (max_x < 1 || max_y < 1) throw FormatError("raster must be at least 2x2", line_no);

    GridSpec grid(max_x + 1, max_y + 1);
    std::vector<double> values(grid.cell_count(), 0.0);
    std::vector<char> seen(grid.cell_count(), 0);
    for (const auto& row : rows) {
        auto idx = grid.index({row.x, row.y});
        if (seen[idx]) throw FormatError("duplicate cell " + describe({row.x, row.y}), row.line);
        seen[idx] = 1;
        values[idx] = row.v;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) throw FormatError("missing cell " + describe(grid.at(i)), line_no);
    }
    return GridField(grid, std::move(values));
}

void write_grid_field(const GridField& field, std::ostream& out) {
    out << "x,y,value\n";
    char buf[64];
    for (std::size_t i = 0; i < field.values().size(); ++i) {
        auto loc = field.grid().at(i);
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, field.values()[i]);
        out << loc.x << ',' << loc.y << ',' << std::string_view(buf, p - buf) << '\n';
    }
}

GridField zscore(const GridField& field) {
    const auto& v = field.values();
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = sd > 0.0 ? (v[i] - mean) / sd : 0.0;
    return GridField(field.grid(), std::move(out));
}

MixtureField random_mixture(const GridSpec& grid, const MixtureSpec& spec, Rng& rng) {
    if (spec.min_components < 1 || spec.max_components < spec.min_components) {
        throw ParameterError("invalid mixture component count range");
    }
    if (!(spec.min_spread > 0.0) || spec.max_spread < spec.min_spread || spec.max_amplitude < spec.min_amplitude) {
        throw ParameterError("invalid mixture amplitude/spread range");
    }
    std::uniform_int_distribution<int> count(spec.min_components, spec.max_components);
    std::uniform_real_distribution<double> cx(0.0, grid.width - 1);
    std::uniform_real_distribution<double> cy(0.0, grid.height - 1);
    std::uniform_real_distribution<double> amp(spec.min_amplitude, spec.max_amplitude);
    std::uniform_real_distribution<double> spread(spec.min_spread, spec.max_spread);
    std::vector<GaussianComponent> comps(count(rng));
    for (auto& c : comps) {
        c.cx = cx(rng);
        c.cy = cy(rng);
        c.amplitude = amp(rng);
        c.spread = spread(rng);
    }
    return MixtureField(grid, std::move(comps));
}

LocationSet initial_locations(const GridSpec& grid, std::size_t n, Rng& rng) {
    const std::size_t cells = grid.cell_count();
    if (n > cells) {
        throw ParameterError("cannot draw " + std::to_string(n) + " locations from " + std::to_string(cells) + " cells");
    }
    std::vector<std::size_t> idx(cells);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, cells - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    LocationSet out;
    for (std::size_t i = 0; i < n; ++i) out.insert(grid.at(idx[i]));
    return out;
}

double mse(std::span<const double> estimate, const Field& truth) {
    const auto& grid = field_grid(truth);
    if (estimate.size() != grid.cell_count()) {
        throw ParameterError("estimate has " + std::to_string(estimate.size()) + " cells, grid has " +
                             std::to_string(grid.cell_count()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = estimate[i] - eval_field(truth, grid.at(i));
        sum += d * d;
    }
    return sum / static_cast<double>(estimate.size());
}

}  // namespace ipp
