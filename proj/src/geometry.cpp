#include "dyadint/geometry.hpp"

#include "dyadint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dyadint {

namespace {

constexpr std::int64_t kCornerLimit = std::int64_t{1} << 52;

struct Endpoint {
    double value;
    bool inclusive;
};

// Intersection of two 1-D intervals given by endpoints is nonempty.
bool meets(Endpoint lo1, Endpoint hi1, Endpoint lo2, Endpoint hi2) {
    Endpoint lo = lo1;
    if (lo2.value > lo.value) {
        lo = lo2;
    } else if (lo2.value == lo.value) {
        lo.inclusive = lo1.inclusive && lo2.inclusive;
    }
    Endpoint hi = hi1;
    if (hi2.value < hi.value) {
        hi = hi2;
    } else if (hi2.value == hi.value) {
        hi.inclusive = hi1.inclusive && hi2.inclusive;
    }
    return lo.value < hi.value || (lo.value == hi.value && lo.inclusive && hi.inclusive);
}

// Interval 1 is contained in interval 2 (interval 1 nonempty).
bool within(Endpoint lo1, Endpoint hi1, Endpoint lo2, Endpoint hi2) {
    const bool lower_ok =
        lo2.value < lo1.value || (lo2.value == lo1.value && (lo2.inclusive || !lo1.inclusive));
    const bool upper_ok =
        hi1.value < hi2.value || (hi1.value == hi2.value && (hi2.inclusive || !hi1.inclusive));
    return lower_ok && upper_ok;
}

std::int64_t to_corner(const BigInt& v) {
    if (v >= kCornerLimit || v <= -kCornerLimit) {
        throw PreconditionError("cube corner out of range; lower the level or shrink the box");
    }
    return v.convert_to<std::int64_t>();
}

BigInt ceil_scaled(const DyadicRational& v, int k) { return -((-v).floor_scaled(k)); }

} // namespace

double Cell::volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
        v *= hi[j] - lo[j];
    }
    return v;
}

// ---------------------------------------------------------------- DyadicCube

DyadicCube::DyadicCube(int level, std::span<const std::int64_t> corner)
    : level_(level), dim_(static_cast<std::uint8_t>(corner.size())) {
    if (corner.empty() || corner.size() > kMaxDim) {
        throw DimensionError("cube dimension must be in 1.." + std::to_string(kMaxDim));
    }
    if (level < 0) {
        throw PreconditionError("cube level must be nonnegative");
    }
    for (std::size_t j = 0; j < corner.size(); ++j) {
        if (corner[j] >= kCornerLimit || corner[j] <= -kCornerLimit) {
            throw PreconditionError("cube corner out of range");
        }
        corner_[j] = corner[j];
    }
}

DyadicRational DyadicCube::volume() const {
    return DyadicRational::pow2(level_ * static_cast<int>(dim_));
}

double DyadicCube::volume_double() const {
    return std::ldexp(1.0, -level_ * static_cast<int>(dim_));
}

std::vector<DyadicCube> DyadicCube::children() const {
    const std::size_t n = std::size_t{1} << dim_;
    std::vector<DyadicCube> out;
    out.reserve(n);
    for (std::size_t mask = 0; mask < n; ++mask) {
        out.push_back(child(mask));
    }
    return out;
}

DyadicCube DyadicCube::child(std::size_t mask) const {
    DyadicCube c = *this;
    c.level_ = level_ + 1;
    for (std::size_t j = 0; j < dim_; ++j) {
        c.corner_[j] = 2 * corner_[j] + static_cast<std::int64_t>((mask >> j) & 1u);
    }
    return c;
}

DyadicCube DyadicCube::parent() const {
    if (level_ == 0) {
        throw PreconditionError("level-0 cube has no parent");
    }
    DyadicCube p = *this;
    p.level_ = level_ - 1;
    for (std::size_t j = 0; j < dim_; ++j) {
        p.corner_[j] = corner_[j] >> 1; // arithmetic shift floors negatives
    }
    return p;
}

DyadicRational DyadicCube::lower(std::size_t axis) const {
    return DyadicRational(corner_[axis]) * DyadicRational::pow2(level_);
}

DyadicRational DyadicCube::upper(std::size_t axis) const {
    return DyadicRational(corner_[axis] + 1) * DyadicRational::pow2(level_);
}

Cell DyadicCube::cell() const {
    Cell c;
    c.dim = dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
        c.lo[j] = std::ldexp(static_cast<double>(corner_[j]), -level_);
        c.hi[j] = std::ldexp(static_cast<double>(corner_[j] + 1), -level_);
    }
    return c;
}

std::strong_ordering operator<=>(const DyadicCube& a, const DyadicCube& b) {
    if (auto c = a.level_ <=> b.level_; c != 0) {
        return c;
    }
    if (auto c = a.dim_ <=> b.dim_; c != 0) {
        return c;
    }
    for (std::size_t j = a.dim_; j-- > 0;) {
        if (auto c = a.corner_[j] <=> b.corner_[j]; c != 0) {
            return c;
        }
    }
    return std::strong_ordering::equal;
}

bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return (a <=> b) == std::strong_ordering::equal;
}

std::string DyadicCube::to_string() const {
    std::ostringstream os;
    os << "k=" << level_ << " (";
    for (std::size_t j = 0; j < dim_; ++j) {
        os << (j != 0 ? "," : "") << corner_[j];
    }
    os << ")";
    return os.str();
}

// ----------------------------------------------------------------------- Box

Box::Box(std::vector<DyadicRational> lower, std::vector<DyadicRational> upper,
         std::vector<Closure> closure)
    : lower_(std::move(lower)), upper_(std::move(upper)), closure_(std::move(closure)) {
    validate_and_cache();
}

Box::Box(std::vector<DyadicRational> lower, std::vector<DyadicRational> upper, Closure closure)
    : lower_(std::move(lower)), upper_(std::move(upper)), closure_(lower_.size(), closure) {
    validate_and_cache();
}

void Box::validate_and_cache() {
    if (lower_.size() != upper_.size() || lower_.size() != closure_.size()) {
        throw DimensionError("box bounds disagree on dimension");
    }
    if (lower_.empty() || lower_.size() > kMaxDim) {
        throw DimensionError("box dimension must be in 1.." + std::to_string(kMaxDim));
    }
    lower_d_.clear();
    upper_d_.clear();
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        if (upper_[j] < lower_[j]) {
            throw PreconditionError("box lower bound exceeds upper bound on axis " +
                                    std::to_string(j + 1));
        }
        auto lo = lower_[j].exact_double();
        auto hi = upper_[j].exact_double();
        if (!lo || !hi) {
            throw PreconditionError("box endpoint is not representable in binary64");
        }
        lower_d_.push_back(*lo);
        upper_d_.push_back(*hi);
    }
}

Box Box::from_doubles(std::span<const double> lower, std::span<const double> upper,
                      Closure closure) {
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    for (double v : lower) {
        lo.push_back(DyadicRational::from_double(v));
    }
    for (double v : upper) {
        hi.push_back(DyadicRational::from_double(v));
    }
    return {std::move(lo), std::move(hi), closure};
}

Box Box::parse(std::string_view text) {
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    std::vector<Closure> cl;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            ++pos;
        }
    };
    while (true) {
        skip_ws();
        if (pos >= text.size() || (text[pos] != '[' && text[pos] != '(')) {
            throw ParseError("expected '[' or '(' in box literal", pos);
        }
        const bool open_left = text[pos] == '(';
        ++pos;
        const auto comma = text.find(',', pos);
        if (comma == std::string_view::npos) {
            throw ParseError("expected ',' in box literal", pos);
        }
        const auto close = text.find_first_of(")]", comma);
        if (close == std::string_view::npos) {
            throw ParseError("expected ')' or ']' in box literal", comma);
        }
        try {
            lo.push_back(DyadicRational::parse(text.substr(pos, comma - pos)));
            hi.push_back(DyadicRational::parse(text.substr(comma + 1, close - comma - 1)));
        } catch (const ParseError& e) {
            throw ParseError(std::string("box literal: ") + e.what(), pos);
        }
        const bool closed_right = text[close] == ']';
        if (open_left && closed_right) {
            throw ParseError("half-open (a,b] sides are not supported", close);
        }
        cl.push_back(open_left ? Closure::Open
                               : (closed_right ? Closure::Closed : Closure::SemiClosed));
        pos = close + 1;
        skip_ws();
        if (pos == text.size()) {
            break;
        }
        if (text[pos] != 'x' && text[pos] != '*') {
            throw ParseError("expected 'x' between box factors", pos);
        }
        ++pos;
    }
    return {std::move(lo), std::move(hi), std::move(cl)};
}

bool Box::empty() const {
    for (std::size_t j = 0; j < dim(); ++j) {
        if (lower_[j] == upper_[j] && closure_[j] != Closure::Closed) {
            return true;
        }
    }
    return false;
}

DyadicRational Box::volume() const {
    DyadicRational v(1);
    for (std::size_t j = 0; j < dim(); ++j) {
        v = v * (upper_[j] - lower_[j]);
    }
    return v;
}

double Box::surface_area() const {
    double total = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) {
        double face = 1.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (i != j) {
                face *= upper_d_[i] - lower_d_[i];
            }
        }
        total += 2.0 * face;
    }
    return total;
}

Relation Box::relate(const Cell& cell, Topology topology) const {
    if (cell.dim != dim()) {
        throw DimensionError("cell and box dimensions differ");
    }
    const bool cell_hi_incl = topology == Topology::Closed;
    bool inside = true;
    for (std::size_t j = 0; j < dim(); ++j) {
        const Endpoint clo{cell.lo[j], true};
        const Endpoint chi{cell.hi[j], cell_hi_incl};
        const Endpoint blo{lower_d_[j], closure_[j] != Closure::Open};
        const Endpoint bhi{upper_d_[j], closure_[j] == Closure::Closed};
        if (!meets(clo, chi, blo, bhi)) {
            return Relation::Outside;
        }
        if (inside && !within(clo, chi, blo, bhi)) {
            inside = false;
        }
    }
    return inside ? Relation::Inside : Relation::Boundary;
}

Cell Box::clip(const Cell& cell) const {
    Cell out = cell;
    for (std::size_t j = 0; j < dim(); ++j) {
        out.lo[j] = std::max(cell.lo[j], lower_d_[j]);
        out.hi[j] = std::min(cell.hi[j], upper_d_[j]);
        if (out.hi[j] < out.lo[j]) {
            out.hi[j] = out.lo[j];
        }
    }
    return out;
}

Cell Box::closure_cell() const {
    Cell c;
    c.dim = static_cast<std::uint8_t>(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
        c.lo[j] = lower_d_[j];
        c.hi[j] = upper_d_[j];
    }
    return c;
}

Box Box::semiclosed() const { return {lower_, upper_, Closure::SemiClosed}; }

Box Box::product(const Box& other) const {
    auto lo = lower_;
    auto hi = upper_;
    auto cl = closure_;
    lo.insert(lo.end(), other.lower_.begin(), other.lower_.end());
    hi.insert(hi.end(), other.upper_.begin(), other.upper_.end());
    cl.insert(cl.end(), other.closure_.begin(), other.closure_.end());
    return {std::move(lo), std::move(hi), std::move(cl)};
}

Box Box::select(std::span<const std::size_t> axes) const {
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    std::vector<Closure> cl;
    for (auto a : axes) {
        lo.push_back(lower_.at(a));
        hi.push_back(upper_.at(a));
        cl.push_back(closure_.at(a));
    }
    return {std::move(lo), std::move(hi), std::move(cl)};
}

std::string Box::to_string() const {
    std::string s;
    for (std::size_t j = 0; j < dim(); ++j) {
        if (j != 0) {
            s += "x";
        }
        s += closure_[j] == Closure::Open ? "(" : "[";
        s += lower_[j].to_string() + "," + upper_[j].to_string();
        s += closure_[j] == Closure::Closed ? "]" : ")";
    }
    return s;
}

DyadicRational volume(const Box& box) { return box.volume(); }

DyadicCube cube_containing(std::span<const DyadicRational> point, int level) {
    std::vector<std::int64_t> corner;
    corner.reserve(point.size());
    for (const auto& p : point) {
        corner.push_back(to_corner(p.floor_scaled(level)));
    }
    return {level, corner};
}

// ----------------------------------------------------------------- CubeRange

CubeRange::CubeRange(const Box& box, int level, Topology topology)
    : level_(level), dim_(box.dim()) {
    if (level < 0) {
        throw PreconditionError("level must be nonnegative");
    }
    if (box.empty()) {
        empty_ = true;
        return;
    }
    const bool closed_cubes = topology == Topology::Closed;
    for (std::size_t j = 0; j < dim_; ++j) {
        const auto& a = box.lower(j);
        const auto& b = box.upper(j);
        const Closure cl = box.closure(j);
        // Lower index: first n whose cube (or its closure) reaches past a.
        BigInt n_lo = (closed_cubes && cl != Closure::Open) ? BigInt(ceil_scaled(a, level) - 1)
                                                            : a.floor_scaled(level);
        // Upper index: last n whose left edge n 2^-k lies in the box side.
        // Same for both topologies: a cube's left edge is always included.
        BigInt n_hi = cl == Closure::Closed ? b.floor_scaled(level)
                                            : BigInt(ceil_scaled(b, level) - 1);
        first_[j] = to_corner(n_lo);
        last_[j] = to_corner(n_hi);
        if (last_[j] < first_[j]) {
            empty_ = true;
        }
    }
}

std::uint64_t CubeRange::size() const {
    if (empty_) {
        return 0;
    }
    std::uint64_t n = 1;
    for (std::size_t j = 0; j < dim_; ++j) {
        n *= static_cast<std::uint64_t>(last_[j] - first_[j] + 1);
    }
    return n;
}

CubeRange::iterator::iterator(const CubeRange* range, bool done) : range_(range), done_(done) {
    if (!done_) {
        for (std::size_t j = 0; j < range_->dim_; ++j) {
            corner_[j] = range_->first_[j];
        }
        current_ = DyadicCube(range_->level_, {corner_.data(), range_->dim_});
    }
}

CubeRange::iterator& CubeRange::iterator::operator++() {
    for (std::size_t j = 0; j < range_->dim_; ++j) {
        if (corner_[j] < range_->last_[j]) {
            ++corner_[j];
            current_ = DyadicCube(range_->level_, {corner_.data(), range_->dim_});
            return *this;
        }
        corner_[j] = range_->first_[j];
    }
    done_ = true;
    return *this;
}

CubeRange cubes_intersecting(const Box& box, int level, Topology topology) {
    return {box, level, topology};
}

} // namespace dyadint
