#include "dyadint/oracle.hpp"

#include "dyadint/batch_eval.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dyadint {

namespace {

Interval zero_interval() { return {0.0, 0.0}; }

struct Side {
    DyadicRational value;
    bool inclusive;
};

// Smallest representable closure covering the given endpoint inclusions.
Closure closure_for(bool lo_incl, bool hi_incl) {
    if (lo_incl) {
        return hi_incl ? Closure::Closed : Closure::SemiClosed;
    }
    return hi_incl ? Closure::Closed : Closure::Open;
}

Side lower_side(const Box& b, std::size_t j) { return {b.lower(j), b.closure(j) != Closure::Open}; }
Side upper_side(const Box& b, std::size_t j) { return {b.upper(j), b.closure(j) == Closure::Closed}; }

void check_same_dim(const BoundOracle& f, const BoundOracle& g) {
    if (f.dim() != g.dim()) {
        throw DimensionError("oracles have different dimensions");
    }
}

// ------------------------------------------------------------------ expr

class ExprOracle final : public BoundOracle {
public:
    ExprOracle(const Expr& e, const Box& support)
        : BoundOracle(e.dim(), support), evaluator_(e), text_(e.to_string()) {
        if (support.dim() != e.dim()) {
            throw DimensionError("support dimension does not match expression");
        }
    }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<std::size_t> live;
        std::vector<Relation> rel(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            rel[i] = support().relate(cells[i], topology);
            if (rel[i] == Relation::Outside) {
                out[i] = zero_interval();
            } else {
                live.push_back(i);
            }
        }
        if (live.empty()) {
            return;
        }
        BoxBatch batch(dim(), live.size());
        for (std::size_t t = 0; t < live.size(); ++t) {
            batch.set(t, support().clip(cells[live[t]]));
        }
        std::vector<Interval> res(live.size());
        std::vector<std::uint8_t> flags(live.size());
        evaluator_.evaluate(batch, res, flags);
        for (std::size_t t = 0; t < live.size(); ++t) {
            const std::size_t i = live[t];
            if (flags[t] != 0) {
                throw OracleError(std::string((flags[t] & kFlagDomain) != 0 ? "domain error"
                                                                             : "enclosure overflow") +
                                      " evaluating " + text_,
                                  cells[i], topology);
            }
            out[i] = rel[i] == Relation::Boundary ? hull(res[t], 0.0) : res[t];
        }
    }

private:
    BatchEvaluator evaluator_;
    std::string text_;
};

// ------------------------------------------------------------- indicator

class IndicatorOracle final : public BoundOracle {
public:
    explicit IndicatorOracle(Region region) : BoundOracle(region.dim(), region.bbox()), region_(std::move(region)) {}
    bool indicator_like() const override { return true; }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Relation> rel(cells.size());
        region_.classify(cells, topology, rel);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            switch (rel[i]) {
            case Relation::Inside:
                out[i] = {1.0, 1.0};
                break;
            case Relation::Outside:
                out[i] = zero_interval();
                break;
            case Relation::Boundary:
                out[i] = {0.0, 1.0};
                break;
            }
        }
    }

private:
    Region region_;
};

// ----------------------------------------------------------- combinators

class LinearOracle final : public BoundOracle {
public:
    LinearOracle(OraclePtr f, OraclePtr g, double alpha, double beta)
        : BoundOracle(f->dim(), support_union(f->support(), g->support())), f_(std::move(f)), g_(std::move(g)),
          alpha_(alpha), beta_(beta) {
        check_same_dim(*f_, *g_);
    }
    bool isotonic() const override { return f_->isotonic() && g_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Interval> a(cells.size());
        std::vector<Interval> b(cells.size());
        f_->bounds(cells, topology, a);
        g_->bounds(cells, topology, b);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out[i] = ia::add(ia::mul(Interval::point(alpha_), a[i]), ia::mul(Interval::point(beta_), b[i]));
        }
    }

private:
    OraclePtr f_;
    OraclePtr g_;
    double alpha_;
    double beta_;
};

class ProductOracle final : public BoundOracle {
public:
    ProductOracle(OraclePtr f, OraclePtr g)
        : BoundOracle(f->dim(), support_intersection(f->support(), g->support())), f_(std::move(f)),
          g_(std::move(g)) {
        check_same_dim(*f_, *g_);
    }
    bool isotonic() const override { return f_->isotonic() && g_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Interval> a(cells.size());
        std::vector<Interval> b(cells.size());
        f_->bounds(cells, topology, a);
        g_->bounds(cells, topology, b);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out[i] = ia::mul(a[i], b[i]);
        }
    }

private:
    OraclePtr f_;
    OraclePtr g_;
};

enum class UnaryKind { Neg, Abs, PosPart, NegPart };

class UnaryOracle final : public BoundOracle {
public:
    UnaryOracle(OraclePtr f, UnaryKind kind) : BoundOracle(f->dim(), f->support()), f_(std::move(f)), kind_(kind) {}
    bool isotonic() const override { return f_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        f_->bounds(cells, topology, out);
        for (auto& r : out.first(cells.size())) {
            switch (kind_) {
            case UnaryKind::Neg:
                r = ia::neg(r);
                break;
            case UnaryKind::Abs:
                r = ia::abs(r);
                break;
            case UnaryKind::PosPart:
                r = ia::max(r, zero_interval());
                break;
            case UnaryKind::NegPart:
                r = ia::max(ia::neg(r), zero_interval());
                break;
            }
        }
    }

private:
    OraclePtr f_;
    UnaryKind kind_;
};

class ExtremumOracle final : public BoundOracle {
public:
    ExtremumOracle(OraclePtr f, OraclePtr g, bool take_max)
        : BoundOracle(f->dim(), support_union(f->support(), g->support())), f_(std::move(f)), g_(std::move(g)),
          take_max_(take_max) {
        check_same_dim(*f_, *g_);
    }
    bool isotonic() const override { return f_->isotonic() && g_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Interval> a(cells.size());
        std::vector<Interval> b(cells.size());
        f_->bounds(cells, topology, a);
        g_->bounds(cells, topology, b);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out[i] = take_max_ ? ia::max(a[i], b[i]) : ia::min(a[i], b[i]);
        }
    }

private:
    OraclePtr f_;
    OraclePtr g_;
    bool take_max_;
};

class RestrictOracle final : public BoundOracle {
public:
    RestrictOracle(OraclePtr f, Region region)
        : BoundOracle(f->dim(), support_intersection(f->support(), region.bbox())), f_(std::move(f)),
          region_(std::move(region)) {
        if (f_->dim() != region_.dim()) {
            throw DimensionError("region dimension does not match oracle");
        }
    }
    bool isotonic() const override { return f_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Relation> rel(cells.size());
        region_.classify(cells, topology, rel);
        std::vector<Cell> live;
        std::vector<std::size_t> index;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (rel[i] == Relation::Outside) {
                out[i] = zero_interval();
            } else {
                live.push_back(cells[i]);
                index.push_back(i);
            }
        }
        std::vector<Interval> vals(live.size());
        f_->bounds(live, topology, vals);
        for (std::size_t t = 0; t < live.size(); ++t) {
            out[index[t]] = rel[index[t]] == Relation::Inside ? vals[t] : hull(vals[t], 0.0);
        }
    }

private:
    OraclePtr f_;
    Region region_;
};

class ComposeOracle final : public BoundOracle {
public:
    ComposeOracle(Expr phi, OraclePtr f) : BoundOracle(f->dim(), f->support()), phi_(std::move(phi)), f_(std::move(f)) {}
    bool isotonic() const override { return f_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        f_->bounds(cells, topology, out);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                out[i] = phi_.eval_interval(std::span<const Interval>(&out[i], 1));
            } catch (const DomainError& e) {
                throw OracleError(e.what(), cells[i], topology);
            }
        }
    }

private:
    Expr phi_;
    OraclePtr f_;
};

class PermutedOracle final : public BoundOracle {
public:
    PermutedOracle(OraclePtr f, std::vector<std::size_t> perm)
        : BoundOracle(f->dim(), f->support().select(perm)), f_(std::move(f)), perm_(std::move(perm)) {}
    bool isotonic() const override { return f_->isotonic(); }

    void bounds(std::span<const Cell> cells, Topology topology, std::span<Interval> out) const override {
        std::vector<Cell> mapped(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            mapped[i].dim = cells[i].dim;
            for (std::size_t j = 0; j < perm_.size(); ++j) {
                mapped[i].lo[perm_[j]] = cells[i].lo[j];
                mapped[i].hi[perm_[j]] = cells[i].hi[j];
            }
        }
        f_->bounds(mapped, topology, out);
    }

private:
    OraclePtr f_;
    std::vector<std::size_t> perm_;
};

bool lipschitz_safe(const Node& n) {
    if (n.kind == NodeKind::Div || n.kind == NodeKind::Sqrt) {
        return false;
    }
    return (!n.lhs || lipschitz_safe(*n.lhs)) && (!n.rhs || lipschitz_safe(*n.rhs));
}

} // namespace

std::string describe(const Cell& cell, Topology topology) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t j = 0; j < cell.dim; ++j) {
        if (j != 0) {
            os << "x";
        }
        os << "[" << cell.lo[j] << "," << cell.hi[j] << (topology == Topology::Closed ? "]" : ")");
    }
    return os.str();
}

Interval BoundOracle::bounds(const Cell& cell, Topology topology) const {
    Interval r;
    bounds(std::span<const Cell>(&cell, 1), topology, std::span<Interval>(&r, 1));
    return r;
}

Interval BoundOracle::bounds(const DyadicCube& cube, Topology topology) const {
    if (cube.dim() != dim()) {
        throw DimensionError("cube dimension does not match oracle");
    }
    return bounds(cube.cell(), topology);
}

// ----------------------------------------------------------------- Region

Region::Region(Box bbox, std::vector<Constraint> constraints)
    : bbox_(std::move(bbox)), constraints_(std::move(constraints)) {
    for (const auto& c : constraints_) {
        if (c.expr.dim() != bbox_.dim()) {
            throw DimensionError("constraint dimension does not match region box");
        }
    }
}

Region Region::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("region JSON: ") + e.what());
    }
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        Box bbox = Box::parse(j.at("bbox").get<std::string>());
        if (bbox.dim() != dim) {
            throw DimensionError("region bbox dimension differs from dim");
        }
        std::vector<Constraint> cons;
        if (j.contains("constraints")) {
            for (const auto& c : j.at("constraints")) {
                cons.push_back({Expr::parse(c.at("expr").get<std::string>(), dim), c.value("strict", false)});
            }
        }
        return {std::move(bbox), std::move(cons)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("region JSON: ") + e.what());
    }
}

Region Region::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open region file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string Region::to_json_text() const {
    nlohmann::json j;
    j["dim"] = dim();
    j["bbox"] = bbox_.to_string();
    j["constraints"] = nlohmann::json::array();
    for (const auto& c : constraints_) {
        j["constraints"].push_back({{"expr", c.expr.to_source()}, {"strict", c.strict}});
    }
    return j.dump();
}

bool Region::contains(std::span<const double> point) const {
    if (point.size() != dim()) {
        throw DimensionError("point dimension does not match region");
    }
    for (std::size_t j = 0; j < dim(); ++j) {
        const double a = bbox_.lower_d(j);
        const double b = bbox_.upper_d(j);
        const Closure cl = bbox_.closure(j);
        const bool lo_ok = cl == Closure::Open ? point[j] > a : point[j] >= a;
        const bool hi_ok = cl == Closure::Closed ? point[j] <= b : point[j] < b;
        if (!lo_ok || !hi_ok) {
            return false;
        }
    }
    for (const auto& c : constraints_) {
        const double v = c.expr.eval_point(point);
        if (c.strict ? !(v < 0.0) : !(v <= 0.0)) {
            return false;
        }
    }
    return true;
}

void Region::classify(std::span<const Cell> cells, Topology topology, std::span<Relation> out) const {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out[i] = bbox_.relate(cells[i], topology);
        if (out[i] != Relation::Outside) {
            live.push_back(i);
        }
    }
    if (live.empty() || constraints_.empty()) {
        return;
    }
    BoxBatch batch(dim(), live.size());
    for (std::size_t t = 0; t < live.size(); ++t) {
        batch.set(t, bbox_.clip(cells[live[t]]));
    }
    std::vector<Interval> res(live.size());
    std::vector<std::uint8_t> flags(live.size());
    for (const auto& c : constraints_) {
        BatchEvaluator ev(c.expr);
        ev.evaluate(batch, res, flags);
        for (std::size_t t = 0; t < live.size(); ++t) {
            Relation& r = out[live[t]];
            if (r == Relation::Outside) {
                continue;
            }
            if (flags[t] != 0) {
                r = Relation::Boundary;
                continue;
            }
            const bool satisfied = c.strict ? res[t].hi < 0.0 : res[t].hi <= 0.0;
            const bool violated = c.strict ? res[t].lo >= 0.0 : res[t].lo > 0.0;
            if (violated) {
                r = Relation::Outside;
            } else if (!satisfied) {
                r = Relation::Boundary;
            }
        }
    }
}

Relation Region::classify(const Cell& cell, Topology topology) const {
    Relation r{};
    classify(std::span<const Cell>(&cell, 1), topology, std::span<Relation>(&r, 1));
    return r;
}

Region Region::intersect(const Region& other) const {
    auto cons = constraints_;
    cons.insert(cons.end(), other.constraints_.begin(), other.constraints_.end());
    return {support_intersection(bbox_, other.bbox_), std::move(cons)};
}

Box support_union(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("support boxes have different dimensions");
    }
    if (a == b || b.empty()) {
        return a;
    }
    if (a.empty()) {
        return b;
    }
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    std::vector<Closure> cl;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const Side la = lower_side(a, j);
        const Side lb = lower_side(b, j);
        const Side ua = upper_side(a, j);
        const Side ub = upper_side(b, j);
        Side l = la.value < lb.value ? la : lb;
        if (la.value == lb.value) {
            l.inclusive = la.inclusive || lb.inclusive;
        }
        Side u = ua.value > ub.value ? ua : ub;
        if (ua.value == ub.value) {
            u.inclusive = ua.inclusive || ub.inclusive;
        }
        lo.push_back(l.value);
        hi.push_back(u.value);
        cl.push_back(closure_for(l.inclusive, u.inclusive));
    }
    return {std::move(lo), std::move(hi), std::move(cl)};
}

Box support_intersection(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("support boxes have different dimensions");
    }
    if (a == b) {
        return a;
    }
    std::vector<DyadicRational> lo;
    std::vector<DyadicRational> hi;
    std::vector<Closure> cl;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        const Side la = lower_side(a, j);
        const Side lb = lower_side(b, j);
        const Side ua = upper_side(a, j);
        const Side ub = upper_side(b, j);
        Side l = la.value > lb.value ? la : lb;
        if (la.value == lb.value) {
            l.inclusive = la.inclusive && lb.inclusive;
        }
        Side u = ua.value < ub.value ? ua : ub;
        if (ua.value == ub.value) {
            u.inclusive = ua.inclusive && ub.inclusive;
        }
        if (u.value < l.value) {
            // Disjoint: collapse to an empty half-open side.
            u = {l.value, false};
            l.inclusive = true;
        }
        lo.push_back(l.value);
        hi.push_back(u.value);
        cl.push_back(closure_for(l.inclusive, u.inclusive));
    }
    return {std::move(lo), std::move(hi), std::move(cl)};
}

// -------------------------------------------------------------- factories

OraclePtr from_expr(const Expr& e, const Box& support) { return std::make_shared<ExprOracle>(e, support); }

OraclePtr zero_oracle(std::size_t dim) {
    std::vector<DyadicRational> z(dim, DyadicRational(0));
    return from_expr(Expr::constant(0.0, dim), Box(z, z, Closure::SemiClosed));
}

OraclePtr indicator(const Region& region) { return std::make_shared<IndicatorOracle>(region); }

OraclePtr box_indicator(const Box& box) { return indicator(Region(box, {})); }

OraclePtr add(const OraclePtr& f, const OraclePtr& g, double alpha, double beta) {
    return std::make_shared<LinearOracle>(f, g, alpha, beta);
}

OraclePtr scale(const OraclePtr& f, double c) { return add(f, zero_oracle(f->dim()), c, 0.0); }

OraclePtr negate(const OraclePtr& f) { return std::make_shared<UnaryOracle>(f, UnaryKind::Neg); }
OraclePtr mul(const OraclePtr& f, const OraclePtr& g) { return std::make_shared<ProductOracle>(f, g); }
OraclePtr abs(const OraclePtr& f) { return std::make_shared<UnaryOracle>(f, UnaryKind::Abs); }
OraclePtr pos_part(const OraclePtr& f) { return std::make_shared<UnaryOracle>(f, UnaryKind::PosPart); }
OraclePtr neg_part(const OraclePtr& f) { return std::make_shared<UnaryOracle>(f, UnaryKind::NegPart); }
OraclePtr max(const OraclePtr& f, const OraclePtr& g) { return std::make_shared<ExtremumOracle>(f, g, true); }
OraclePtr min(const OraclePtr& f, const OraclePtr& g) { return std::make_shared<ExtremumOracle>(f, g, false); }

OraclePtr restrict(const OraclePtr& f, const Region& region) { return std::make_shared<RestrictOracle>(f, region); }

OraclePtr lipschitz_compose(const Expr& phi, const OraclePtr& f, const std::optional<Expr>& derivative) {
    if (phi.dim() != 1) {
        throw DimensionError("composed function must be an expression in x1 only");
    }
    const double at_zero = phi.eval_point(std::vector<double>{0.0});
    if (at_zero != 0.0) {
        throw PreconditionError("composed function must vanish at 0 so the result vanishes outside the support");
    }
    Interval range = hull(f->bounds(f->support().closure_cell(), Topology::Closed), 0.0);
    if (!range.is_finite()) {
        throw PreconditionError("oracle range is unbounded");
    }
    if (derivative) {
        if (derivative->dim() != 1) {
            throw DimensionError("derivative bound must be an expression in x1 only");
        }
        Interval d;
        try {
            d = derivative->eval_interval(std::span<const Interval>(&range, 1));
        } catch (const DomainError&) {
            throw PreconditionError("derivative bound is undefined on the range of the oracle");
        }
        if (!d.is_finite()) {
            throw PreconditionError("derivative is unbounded on the range of the oracle");
        }
    } else if (!lipschitz_safe(*phi.root())) {
        throw PreconditionError(
            "composed function uses division or sqrt; supply a derivative bound to certify Lipschitz continuity");
    }
    try {
        (void)phi.eval_interval(std::span<const Interval>(&range, 1));
    } catch (const DomainError&) {
        throw PreconditionError("composed function is undefined on the range of the oracle");
    }
    return std::make_shared<ComposeOracle>(phi, f);
}

OraclePtr permute_axes(const OraclePtr& f, std::span<const std::size_t> perm) {
    if (perm.size() != f->dim()) {
        throw DimensionError("permutation length does not match oracle dimension");
    }
    std::vector<bool> seen(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || seen[p]) {
            throw PreconditionError("not a permutation");
        }
        seen[p] = true;
    }
    return std::make_shared<PermutedOracle>(f, std::vector<std::size_t>(perm.begin(), perm.end()));
}

} // namespace dyadint
