#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "ipp/location.hpp"
#include "ipp/rng.hpp"

namespace ipp {

struct GaussianComponent {
    double cx = 0.0;
    double cy = 0.0;
    double amplitude = 1.0;
    double spread = 1.0;  // isotropic standard deviation in cells
};

// Sum of isotropic Gaussian bumps over a grid.
class MixtureField {
public:
    MixtureField(GridSpec grid, std::vector<GaussianComponent> components);

    const GridSpec& grid() const { return grid_; }
    const std::vector<GaussianComponent>& components() const { return components_; }
    double value(Location loc) const;

private:
    GridSpec grid_;
    std::vector<GaussianComponent> components_;
};

// Dense row-major raster.
class GridField {
public:
    GridField(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(Location loc) const;

    friend bool operator==(const GridField&, const GridField&) = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

using Field = std::variant<MixtureField, GridField>;

const GridSpec& field_grid(const Field& field);

// Throws DomainError for locations outside the field's grid.
double eval_field(const Field& field, Location loc);

// Ground truth at every cell, row-major.
std::vector<double> field_values(const Field& field);

// Noise-free when noise_sd == 0; otherwise adds one N(0, noise_sd^2) draw.
double sample_measurement(const Field& field, Location loc, double noise_sd, Rng& rng);

// Raster CSV: header `x,y,value`, one row per cell, each cell exactly once.
GridField load_grid_field(const std::filesystem::path& path);
GridField parse_grid_field(std::istream& in);
void write_grid_field(const GridField& field, std::ostream& out);

// Rescales a raster to zero mean and unit standard deviation.
GridField zscore(const GridField& field);

struct MixtureSpec {
    int min_components = 3;
    int max_components = 5;
    double min_amplitude = 1.0;
    double max_amplitude = 5.0;
    double min_spread = 2.0;
    double max_spread = 6.0;
};

MixtureField random_mixture(const GridSpec& grid, const MixtureSpec& spec, Rng& rng);

// n distinct cells drawn uniformly without replacement.
LocationSet initial_locations(const GridSpec& grid, std::size_t n, Rng& rng);

// Mean squared error over every grid cell.
double mse(std::span<const double> estimate, const Field& truth);

}  // namespace ipp
