#include "ipp/location.hpp"

#include <string>

#include "ipp/errors.hpp"

namespace ipp {

GridSpec::GridSpec(int w, int h) : width(w), height(h) {
    if (w < 2 || h < 2) {
        throw ParameterError("grid must be at least 2x2, got " + std::to_string(w) + "x" + std::to_string(h));
    }
}

std::vector<Location> GridSpec::cells() const {
    std::vector<Location> out;
    out.reserve(cell_count());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) out.push_back({x, y});
    }
    return out;
}

LocationSet::LocationSet(std::initializer_list<Location> locs) {
    for (auto l : locs) insert(l);
}

LocationSet::LocationSet(const std::vector<Location>& locs) {
    for (auto l : locs) insert(l);
}

bool LocationSet::insert(Location l) {
    if (!index_.insert(l).second) return false;
    items_.push_back(l);
    return true;
}

}  // namespace ipp
