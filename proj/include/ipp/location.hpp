#pragma once

#include <compare>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <unordered_set>
#include <vector>

namespace ipp {

struct Location {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(Location, Location) = default;
    friend constexpr auto operator<=>(Location, Location) = default;
};

struct LocationHash {
    std::size_t operator()(Location l) const noexcept {
        return std::hash<long long>{}((static_cast<long long>(l.x) << 32) ^ static_cast<unsigned>(l.y));
    }
};

constexpr int manhattan_distance(Location a, Location b) {
    return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

struct GridSpec {
    int width = 30;
    int height = 30;

    GridSpec() = default;
    GridSpec(int w, int h);

    std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }
    bool contains(Location l) const { return l.x >= 0 && l.y >= 0 && l.x < width && l.y < height; }
    std::size_t index(Location l) const { return static_cast<std::size_t>(l.y) * width + l.x; }
    Location at(std::size_t index) const {
        return {static_cast<int>(index % width), static_cast<int>(index / width)};
    }
    // Every cell in row-major order.
    std::vector<Location> cells() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Insertion-ordered set of distinct locations.
class LocationSet {
public:
    LocationSet() = default;
    LocationSet(std::initializer_list<Location> locs);
    explicit LocationSet(const std::vector<Location>& locs);

    // Returns false if already present.
    bool insert(Location l);
    bool contains(Location l) const { return index_.count(l) != 0; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    const std::vector<Location>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    Location operator[](std::size_t i) const { return items_[i]; }

    friend bool operator==(const LocationSet& a, const LocationSet& b) { return a.items_ == b.items_; }

private:
    std::vector<Location> items_;
    std::unordered_set<Location, LocationHash> index_;
};

}  // namespace ipp
