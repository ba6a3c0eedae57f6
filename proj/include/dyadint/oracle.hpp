#ifndef DYADINT_ORACLE_HPP
#define DYADINT_ORACLE_HPP

#include "dyadint/errors.hpp"
#include "dyadint/expr.hpp"
#include "dyadint/geometry.hpp"
#include "dyadint/interval.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dyadint {

std::string describe(const Cell& cell, Topology topology);

// Domain failure while bounding a particular cell.
class OracleError : public DomainError {
public:
    OracleError(const std::string& what, const Cell& cell, Topology topology)
        : DomainError(what + " over cell " + describe(cell, topology)), cell_(cell) {}
    const Cell& cell() const noexcept { return cell_; }

private:
    Cell cell_;
};

// A bounded function vanishing outside its support box, known only through
// certified enclosures of its range over cells.
//
// Contract for implementations:
//   * bounds are pure and deterministic;
//   * the true range over each cell lies inside the returned interval;
//   * a cell disjoint from support() gets exactly [0,0];
//   * isotonic() promises child-cell enclosures nest inside parent ones.
class BoundOracle {
public:
    BoundOracle(std::size_t dim, Box support) : dim_(dim), support_(std::move(support)) {}
    virtual ~BoundOracle() = default;

    std::size_t dim() const noexcept { return dim_; }
    const Box& support() const noexcept { return support_; }
    virtual bool isotonic() const { return true; }
    // True when every enclosure is one of [0,0], [1,1], [0,1].
    virtual bool indicator_like() const { return false; }

    virtual void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const = 0;

    Interval bounds(const Cell& cell, Topology topology = Topology::SemiClosed) const;
    Interval bounds(const DyadicCube& cube, Topology topology = Topology::SemiClosed) const;

private:
    std::size_t dim_;
    Box support_;
};

using OraclePtr = std::shared_ptr<const BoundOracle>;

struct Constraint {
    Expr expr;           // expr <= 0, or expr < 0 when strict
    bool strict = false;
};

// Conjunction of constraints inside a bounding box.
class Region {
public:
    Region(Box bbox, std::vector<Constraint> constraints);

    // {"dim": 2, "bbox": "[-1,1]x[-1,1]", "constraints": [{"expr": "...", "strict": false}]}
    static Region from_json_text(const std::string& text);
    static Region load(const std::string& path);
    std::string to_json_text() const;

    std::size_t dim() const noexcept { return bbox_.dim(); }
    const Box& bbox() const noexcept { return bbox_; }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }

    bool contains(std::span<const double> point) const;

    // Inside: every point of the cell is in the region; Outside: none is.
    // Constraint failures on a cell (domain errors) yield Boundary.
    void classify(std::span<const Cell> cells, Topology topology, std::span<Relation> out) const;
    Relation classify(const Cell& cell, Topology topology = Topology::SemiClosed) const;

    // Region with constraints of both, bbox = intersection hull.
    Region intersect(const Region& other) const;

private:
    Box bbox_;
    std::vector<Constraint> constraints_;
};

// Box hulls used for composite supports.
Box support_union(const Box& a, const Box& b);
Box support_intersection(const Box& a, const Box& b);

// f = e on support, 0 elsewhere.
OraclePtr from_expr(const Expr& e, const Box& support);
OraclePtr zero_oracle(std::size_t dim);
OraclePtr indicator(const Region& region);
OraclePtr box_indicator(const Box& box);

OraclePtr add(const OraclePtr& f, const OraclePtr& g, double alpha = 1.0, double beta = 1.0);
OraclePtr scale(const OraclePtr& f, double c);
OraclePtr negate(const OraclePtr& f);
OraclePtr mul(const OraclePtr& f, const OraclePtr& g);
OraclePtr abs(const OraclePtr& f);
OraclePtr pos_part(const OraclePtr& f);
OraclePtr neg_part(const OraclePtr& f);
OraclePtr max(const OraclePtr& f, const OraclePtr& g);
OraclePtr min(const OraclePtr& f, const OraclePtr& g);
OraclePtr restrict(const OraclePtr& f, const Region& region);

// phi(f) for phi in one variable (x1), Lipschitz on the range of f.
// phi(0) must be 0. Without a derivative bound only Lipschitz-safe node kinds
// are accepted; with one, |phi'| must have a finite enclosure over the range.
OraclePtr lipschitz_compose(const Expr& phi, const OraclePtr& f,
                            const std::optional<Expr>& derivative = std::nullopt);

// Axis j of the new oracle is axis perm[j] of f.
OraclePtr permute_axes(const OraclePtr& f, std::span<const std::size_t> perm);

} // namespace dyadint

#endif
