#ifndef DYADINT_GEOMETRY_HPP
#define DYADINT_GEOMETRY_HPP

#include "dyadint/dyadic_rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyadint {

// Largest supported dimension. Cubes and cells store coordinates inline.
inline constexpr std::size_t kMaxDim = 6;

// Cubes past this level are refused unless a caller raises the cap.
inline constexpr int kDefaultLevelCap = 40;

// Per-axis shape of a Box side: [a,b), [a,b] or (a,b).
enum class Closure : std::uint8_t { SemiClosed, Closed, Open };

// How oracles read a Cell: as [lo,hi) on every axis, or as its closure.
enum class Topology : std::uint8_t { SemiClosed, Closed };

// Axis-aligned box with binary64 endpoints. Every finite double is a dyadic
// rational, so comparisons against cube coordinates are exact.
struct Cell {
    std::uint8_t dim = 0;
    std::array<double, kMaxDim> lo{};
    std::array<double, kMaxDim> hi{};

    double volume() const;
};

// Element of D_k(R^m): the cube prod_j [n_j 2^-k, (n_j + 1) 2^-k).
class DyadicCube {
public:
    DyadicCube() = default;
    DyadicCube(int level, std::span<const std::int64_t> corner);

    int level() const noexcept { return level_; }
    std::size_t dim() const noexcept { return dim_; }
    std::int64_t corner(std::size_t axis) const { return corner_[axis]; }
    std::span<const std::int64_t> corners() const { return {corner_.data(), dim_}; }

    // Exact: 2^-(k m).
    DyadicRational volume() const;
    // Binary64 form of the volume, exact while k m <= 1074.
    double volume_double() const;

    // The 2^m cubes of level k+1 partitioning this one, in cube order.
    std::vector<DyadicCube> children() const;
    // Child number mask of children(); bit j picks the upper half of axis j.
    DyadicCube child(std::size_t mask) const;
    DyadicCube parent() const;

    DyadicRational lower(std::size_t axis) const;
    DyadicRational upper(std::size_t axis) const;

    Cell cell() const;

    // Order: level, then corners compared from the last axis to the first,
    // so that in 2-D (0,0) < (1,0) < (0,1) < (1,1).
    friend std::strong_ordering operator<=>(const DyadicCube& a, const DyadicCube& b);
    friend bool operator==(const DyadicCube& a, const DyadicCube& b);

    std::string to_string() const;

private:
    int level_ = 0;
    std::uint8_t dim_ = 0;
    std::array<std::int64_t, kMaxDim> corner_{};
};

enum class Relation : std::uint8_t { Outside, Inside, Boundary };

// m-rectangle with dyadic endpoints and per-axis closure markers.
class Box {
public:
    Box() = default;
    Box(std::vector<DyadicRational> lower, std::vector<DyadicRational> upper,
        std::vector<Closure> closure);
    // All axes share one closure marker.
    Box(std::vector<DyadicRational> lower, std::vector<DyadicRational> upper,
        Closure closure = Closure::SemiClosed);

    static Box from_doubles(std::span<const double> lower, std::span<const double> upper,
                            Closure closure = Closure::SemiClosed);

    // Literal syntax: "[0,1)x[0.25,3/2^2]x(0,1)".
    static Box parse(std::string_view text);

    std::size_t dim() const noexcept { return lower_.size(); }
    const DyadicRational& lower(std::size_t axis) const { return lower_[axis]; }
    const DyadicRational& upper(std::size_t axis) const { return upper_[axis]; }
    double lower_d(std::size_t axis) const { return lower_d_[axis]; }
    double upper_d(std::size_t axis) const { return upper_d_[axis]; }
    Closure closure(std::size_t axis) const { return closure_[axis]; }

    bool empty() const;

    // |E|_m; closure markers play no part.
    DyadicRational volume() const;

    // Sum over the axes of the (m-1)-volumes of the faces, as a double.
    double surface_area() const;

    // Exact relation of a cell (read with the given topology) to this box.
    Relation relate(const Cell& cell, Topology topology) const;

    // Closure of (cell ∩ box), assuming the two meet.
    Cell clip(const Cell& cell) const;

    Cell closure_cell() const;

    // Same bounds with every axis half-open.
    Box semiclosed() const;

    // Concatenate axes: this × other.
    Box product(const Box& other) const;

    // Keep the listed axes, in order.
    Box select(std::span<const std::size_t> axes) const;

    std::string to_string() const;

    friend bool operator==(const Box& a, const Box& b) = default;

private:
    void validate_and_cache();

    std::vector<DyadicRational> lower_;
    std::vector<DyadicRational> upper_;
    std::vector<Closure> closure_;
    std::vector<double> lower_d_;
    std::vector<double> upper_d_;
};

DyadicRational volume(const Box& box);

// The cube of level k holding the point under the [n 2^-k, (n+1) 2^-k) convention.
DyadicCube cube_containing(std::span<const DyadicRational> point, int level);

// Cubes of level k meeting the box, in cube order. With Topology::Closed the
// cube closures are tested instead.
class CubeRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = DyadicCube;
        using difference_type = std::ptrdiff_t;
        using pointer = const DyadicCube*;
        using reference = const DyadicCube&;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        iterator operator++(int) {
            iterator tmp = *this;
            ++*this;
            return tmp;
        }
        friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_; }

    private:
        friend class CubeRange;
        iterator(const CubeRange* range, bool done);

        const CubeRange* range_ = nullptr;
        DyadicCube current_;
        std::array<std::int64_t, kMaxDim> corner_{};
        bool done_ = true;
    };

    CubeRange(const Box& box, int level, Topology topology = Topology::SemiClosed);

    iterator begin() const { return {this, empty_}; }
    iterator end() const { return {}; }

    std::uint64_t size() const;
    int level() const noexcept { return level_; }
    std::int64_t first(std::size_t axis) const { return first_[axis]; }
    std::int64_t last(std::size_t axis) const { return last_[axis]; }

private:
    int level_;
    std::size_t dim_;
    std::array<std::int64_t, kMaxDim> first_{};
    std::array<std::int64_t, kMaxDim> last_{};
    bool empty_ = false;
};

CubeRange cubes_intersecting(const Box& box, int level, Topology topology = Topology::SemiClosed);

} // namespace dyadint

#endif
