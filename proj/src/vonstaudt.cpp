#include "chiro/vonstaudt.hpp"

#include <algorithm>
#include <set>

#include "chiro/incidence.hpp"

namespace chiro {

void ArithmeticSequence::validate(const std::optional<Scalar>& avoid) const {
    if (terms.size() < 2) throw error("sequence too short");
    if (terms[0] != 0 || terms[1] != 1) throw error("sequence must start 0, 1");
    if (steps.size() + 2 != terms.size()) throw error("step count mismatch");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& st = steps[i];
        if (st.s >= i + 2 || st.t >= i + 2) throw error("step refers to a later term");
        const Scalar& a = terms[st.s];
        const Scalar& b = terms[st.t];
        if (b == 0) throw error("second operand is zero");
        Scalar v;
        switch (st.op) {
            case '+': v = a + b; break;
            case '-': v = a - b; break;
            case '*': v = a * b; break;
            case '/': v = a / b; break;
            default: throw error("unknown operation");
        }
        if (v != terms[i + 2]) throw error("step value mismatch");
    }
    if (avoid)
        for (const auto& t : terms)
            if (t == *avoid) throw error("sequence contains the forbidden value");
}

namespace {

// Incremental sequence builder with value deduplication.
struct SeqBuilder {
    std::vector<Scalar> terms{Scalar(0), Scalar(1)};
    std::vector<ArithStep> steps;
    std::map<Scalar, std::size_t> index{{Scalar(0), 0}, {Scalar(1), 1}};

    Scalar compute(char op, std::size_t s, std::size_t t) const {
        const Scalar& a = terms[s];
        const Scalar& b = terms[t];
        if (b == 0) throw error("second operand is zero");
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
        }
        throw error("unknown operation");
    }

    std::size_t emit(char op, std::size_t s, std::size_t t) {
        Scalar v = compute(op, s, t);
        auto it = index.find(v);
        if (it != index.end()) return it->second;
        terms.push_back(std::move(v));
        steps.push_back({s, t, op});
        index.emplace(terms.back(), terms.size() - 1);
        return terms.size() - 1;
    }

    // Appends even when the value already occurs earlier, so the goal can
    // end the sequence.
    std::size_t emit_forced(char op, std::size_t s, std::size_t t) {
        terms.push_back(compute(op, s, t));
        steps.push_back({s, t, op});
        index.emplace(terms.back(), terms.size() - 1);
        return terms.size() - 1;
    }

    // Double-and-add chain for a positive integer.
    std::size_t integer_chain(const Integer& n) {
        if (n <= 0) throw error("integer chain needs a positive integer");
        auto it = index.find(Scalar(n));
        if (it != index.end()) return it->second;
        std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        std::size_t acc = 1;  // the term u_1 = 1
        for (std::size_t i = bits - 1; i-- > 0;) {
            acc = emit('+', acc, acc);
            if (mpz_tstbit(n.get_mpz_t(), i)) acc = emit('+', acc, 1);
        }
        return acc;
    }

    ArithmeticSequence finish(const Scalar& g) {
        if (terms.back() != g) throw error("sequence does not end at the goal");
        return ArithmeticSequence{terms, steps};
    }
};

ArithmeticSequence build_plain(const Scalar& g) {
    SeqBuilder b;
    if (g == 1) return b.finish(g);
    if (g == 0) {
        std::size_t m = b.emit('-', 0, 1);  // -1
        b.emit_forced('+', m, 1);
        return b.finish(g);
    }
    Integer num = g.get_num() < 0 ? Integer(-g.get_num()) : g.get_num();
    Integer den = g.get_den();
    std::size_t in = b.integer_chain(num);
    std::size_t r = in;
    if (den != 1) {
        std::size_t id = b.integer_chain(den);
        r = b.emit('/', in, id);
    }
    if (g < 0) b.emit('-', 0, r);
    return b.finish(g);
}

// Rebuilds a sequence so that no term equals fv (nor any value of the
// forbidden set F). A term whose value is fv is replaced by -fv, and every
// later use adapts with at most one extra negation, following the
// substitution argument behind the size bound.
ArithmeticSequence build_avoiding(const ArithmeticSequence& base, const Scalar& g,
                                  const Scalar& fv, const std::set<Scalar>& forb) {
    auto f_hit = [&](const Scalar& v) { return forb.count(v) > 0; };
    if (f_hit(Scalar(-fv))) throw error("both signs of a forbidden value are excluded");
    SeqBuilder b;
    // maps an original index to (new index, sign of the stored value)
    std::vector<std::pair<std::size_t, int>> repr{{0, 1}, {1, 1}};
    for (std::size_t i = 0; i < base.steps.size(); ++i) {
        const auto& st = base.steps[i];
        const Scalar& target_raw = base.terms[i + 2];
        bool flip = target_raw == fv;
        Scalar target = flip ? Scalar(-target_raw) : target_raw;
        auto [ia, sa] = repr[st.s];
        auto [ib, sb] = repr[st.t];

        // search a short derivation of the target from the available terms
        std::optional<std::size_t> got;
        auto try_ops = [&](std::size_t u, std::size_t v) {
            if (got) return;
            const Scalar& a = b.terms[u];
            const Scalar& c = b.terms[v];
            struct Cand {
                char op;
                std::size_t s, t;
                Scalar val;
            };
            std::vector<Cand> cands;
            if (c != 0) {
                cands.push_back({'+', u, v, a + c});
                cands.push_back({'-', u, v, a - c});
                cands.push_back({'*', u, v, a * c});
                cands.push_back({'/', u, v, a / c});
            }
            if (a != 0) {
                cands.push_back({'-', v, u, c - a});
                cands.push_back({'/', v, u, c / a});
            }
            for (const auto& cd : cands)
                if (cd.val == target) {
                    got = b.emit(cd.op, cd.s, cd.t);
                    return;
                }
        };
        // as try_ops, but negating the combined value afterwards; covers
        // doublings whose operands are only available negated
        auto try_neg_ops = [&](std::size_t u, std::size_t v) {
            if (got) return;
            if (b.terms[v] == 0) return;
            for (char op : {'+', '-', '*', '/'}) {
                Scalar w = b.compute(op, u, v);
                if (w == 0 || f_hit(w) || Scalar(-w) != target) continue;
                std::size_t iw = b.emit(op, u, v);
                got = b.emit('-', 0, iw);
                return;
            }
        };
        try_ops(ia, ib);
        if (!got) {
            try_neg_ops(ia, ib);
            try_neg_ops(ib, ia);
        }
        if (!got) {
            // one auxiliary negation of either operand, avoiding f
            for (auto [u, other] : {std::pair<std::size_t, std::size_t>{ia, ib},
                                    std::pair<std::size_t, std::size_t>{ib, ia}}) {
                if (got) break;
                if (b.terms[u] == 0) continue;
                if (f_hit(Scalar(-b.terms[u]))) continue;
                std::size_t nu = b.emit('-', 0, u);
                try_ops(nu, other);
                try_ops(other, nu);
            }
        }
        if (!got) throw error("forbidden-value rewrite failed");
        repr.push_back({*got, flip ? -1 : 1});
    }
    auto [ig, sg] = repr.back();
    if (sg != 1 || b.terms[ig] != g) throw error("forbidden-value rewrite lost the goal");
    // the goal must be the final term; when a rewrite deduplicated it away
    // from the end, re-derive it through a safe detour value t
    if (ig + 1 != b.terms.size()) {
        bool done = false;
        if (g != 0) {
            if (!f_hit(Scalar(g + 2)) && !f_hit(rat(2))) {  // g = (g+2) - 2
                std::size_t t2 = b.emit('+', 1, 1);
                std::size_t s1 = b.emit('+', ig, t2);
                b.emit_forced('-', s1, t2);
                done = true;
            } else if (!f_hit(Scalar(g - 1)) && !f_hit(rat(-1))) {  // g = (g-1) - (-1)
                std::size_t tn = b.emit('-', 0, 1);
                std::size_t s1 = b.emit('+', ig, tn);
                b.emit_forced('-', s1, tn);
                done = true;
            } else if (!f_hit(Scalar(g + 3)) && !f_hit(rat(2)) && !f_hit(rat(3))) {
                std::size_t t2 = b.emit('+', 1, 1);  // g = (g+3) - 3
                std::size_t t3 = b.emit('+', t2, 1);
                std::size_t s1 = b.emit('+', ig, t3);
                b.emit_forced('-', s1, t3);
                done = true;
            } else if (!f_hit(Scalar(-g)) && !f_hit(rat(-1))) {  // g = (-g) / (-1)
                std::size_t tn = b.emit('-', 0, 1);
                std::size_t s1 = b.emit('*', ig, tn);
                b.emit_forced('/', s1, tn);
                done = true;
            }
        } else {
            // 0 = t + (-t) for a detour t with t, -t both allowed
            for (long tv : {2L, 3L, 5L}) {
                if (done || f_hit(rat(tv)) || f_hit(rat(-tv)) || (tv != 2 && f_hit(rat(2))) ||
                    (tv == 5 && (f_hit(rat(3)) || f_hit(rat(4)))))
                    continue;
                std::size_t ti = b.integer_chain(Integer(tv));
                std::size_t ni = b.emit('-', 0, ti);
                b.emit_forced('+', ni, ti);
                done = true;
            }
        }
        if (!done) throw error("forbidden-value rewrite misordered the goal");
    }
    ArithmeticSequence out{b.terms, b.steps};
    out.validate(fv);
    return out;
}

// Derives g while avoiding every value in the forbidden set. Runs the
// single-value rewrite once per offending value; since each pass filters
// against the whole set, offenders strictly decrease. Falls back to a
// rescaled chain g = (num*m)/(den*m) when a rewrite is blocked.
ArithmeticSequence sequence_avoiding_set(const Scalar& g, const std::set<Scalar>& forb) {
    auto offender = [&](const ArithmeticSequence& s) -> std::optional<Scalar> {
        for (const auto& t : s.terms)
            if (forb.count(t)) return t;
        return std::nullopt;
    };
    auto seq = build_plain(g);
    try {
        for (int pass = 0; pass < 8; ++pass) {
            auto bad = offender(seq);
            if (!bad) {
                seq.validate();
                return seq;
            }
            seq = build_avoiding(seq, g, *bad, forb);
        }
    } catch (const error&) {
        // fall through to the rescaled chains
    }
    if (g != 0) {
        Integer num = g.get_num() < 0 ? Integer(-g.get_num()) : g.get_num();
        Integer den = g.get_den();
        for (long m : {3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L}) {
            SeqBuilder b;
            std::size_t in = b.integer_chain(num * m);
            std::size_t id = b.integer_chain(den * m);
            std::size_t r = b.emit('/', in, id);
            if (g < 0) r = b.emit('-', 0, r);
            if (b.terms[r] != g || r + 1 != b.terms.size()) continue;
            ArithmeticSequence s{b.terms, b.steps};
            if (offender(s)) continue;
            s.validate();
            return s;
        }
    } else {
        for (long m : {2L, 3L, 5L, 7L, 11L}) {  // 0 = m + (-m)
            SeqBuilder b;
            std::size_t ti = b.integer_chain(Integer(m));
            std::size_t ni = b.emit('-', 0, ti);
            std::size_t r = b.emit_forced('+', ni, ti);
            (void)r;
            ArithmeticSequence s{b.terms, b.steps};
            if (offender(s)) continue;
            s.validate();
            return s;
        }
    }
    throw error("could not derive the goal while avoiding the forbidden values");
}

}  // namespace

ArithmeticSequence arithmetic_sequence_plain(const Scalar& g) {
    auto s = build_plain(g);
    s.validate();
    return s;
}

ArithmeticSequence arithmetic_sequence_for(const Scalar& g, const Scalar& f) {
    if (f == 0 || f == 1 || f == g)
        throw precondition_error("forbidden value must differ from 0, 1 and the goal");
    auto base = build_plain(g);
    base.validate();
    bool hit = false;
    for (const auto& t : base.terms) hit = hit || t == f;
    if (!hit) return base;
    auto out = build_avoiding(base, g, f, {f});
    if (out.k() > 3 + 2 * base.k()) throw error("forbidden-value rewrite exceeded the bound");
    return out;
}

std::vector<std::array<Label, 3>> GadgetRecord::triples() const {
    if (mul_layout)
        return {{yA, yB, b0},    {yC, yD, binf},  {b1, yA, yC},
                {blue1, yB, yC}, {blue2, yA, yD}, {gslot, yB, yD}};
    return {{yA, yB, binf},   {yC, yD, binf},  {b0, yA, yC},
            {blue1, yB, yC}, {blue2, yA, yD}, {gslot, yB, yD}};
}

namespace {

struct SlotAssign {
    bool mul_layout;
    bool result_in_blue2;
    // parameters of the slot occupants; the unknown one is the result
    Scalar blue1_param, known_param;  // known_param: blue2 (normal) or gslot (rewired)
};

SlotAssign slots_for(GadgetKind kind, const Scalar& x, const Scalar& y) {
    switch (kind) {
        case GadgetKind::add: return {false, false, y, x};
        case GadgetKind::sub: return {false, true, y, x};
        case GadgetKind::mul: return {true, false, y, x};
        case GadgetKind::divide: return {true, true, y, x};
    }
    throw error("unknown gadget kind");
}

Scalar result_value(GadgetKind kind, const Scalar& x, const Scalar& y) {
    switch (kind) {
        case GadgetKind::add: return x + y;
        case GadgetKind::sub: return x - y;
        case GadgetKind::mul: return x * y;
        case GadgetKind::divide:
            if (y == 0) throw precondition_error("division gadget needs y != 0");
            return x / y;
    }
    throw error("unknown gadget kind");
}

struct GadgetGeom {
    Vec A, B, C, D, result;
};

// One sampling attempt of the gadget geometry. Returns nothing when the
// sample is degenerate (parallel lines, points at infinity, on-line hits).
std::optional<GadgetGeom> sample_geometry(const LineBasis& lb, const SlotAssign& sl,
                                          const ProjectivePoint& blue1,
                                          const ProjectivePoint& known, const Scalar& expected,
                                          RatRng& rng, unsigned bits) {
    const ProjectivePoint& anchor3 = sl.mul_layout ? lb.b1 : lb.b0;
    const ProjectivePoint& anchorB = sl.mul_layout ? lb.b0 : lb.b_inf;
    if (!lb.b0.is_affine() || !lb.b1.is_affine() || !lb.b_inf.is_affine())
        throw precondition_error("gadget basis points must be affine");
    Vec base = lb.b0.affine();
    Vec a{base[0] + rng.unit(bits), base[1] + rng.unit(bits)};
    auto A = ProjectivePoint::from_affine(a);
    if (collinear(lb.b0, lb.b_inf, A)) return std::nullopt;
    Scalar s = rng.unit(bits);
    if (s == 0 || s == 1) return std::nullopt;
    Vec anchor3_aff = anchor3.affine();
    Vec c = a + s * (anchor3_aff - a);
    auto C = ProjectivePoint::from_affine(c);

    auto B = line_intersect_2d(A, anchorB, blue1, C);
    if (!B || !B->is_affine()) return std::nullopt;
    std::optional<ProjectivePoint> D, R;
    if (sl.result_in_blue2) {
        D = line_intersect_2d(*B, known, C, lb.b_inf);
        if (!D || !D->is_affine()) return std::nullopt;
        R = line_intersect_2d(A, *D, lb.b0, lb.b_inf);
    } else {
        D = line_intersect_2d(A, known, C, lb.b_inf);
        if (!D || !D->is_affine()) return std::nullopt;
        R = line_intersect_2d(*B, *D, lb.b0, lb.b_inf);
    }
    if (!R || !R->is_affine()) return std::nullopt;
    for (const auto* p : {&*B, &*D})
        if (collinear(lb.b0, lb.b_inf, *p)) return std::nullopt;
    // rigidity check doubles as a degeneracy filter
    auto t = lb.param_of(*R);
    if (!t || *t != expected) return std::nullopt;
    return GadgetGeom{a, B->affine(), c, D->affine(), R->affine()};
}

// Expected-collinearity oracle on position classes. Triples are expected
// when two members coincide, when all lie on the gadget line, or when they
// match a certificate line.
struct ExpectedTriples {
    std::vector<Vec> positions;             // by point id
    std::vector<bool> on_line;              // by point id
    std::vector<std::set<std::size_t>> cert;  // certificate triples as id sets

    std::size_t id_of(const Vec& p) {
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (positions[i] == p) return i;
        positions.push_back(p);
        return positions.size() - 1;
    }

    bool expected(std::size_t i, std::size_t j, std::size_t k) const {
        if (i == j || j == k || i == k) return true;
        if (on_line[i] && on_line[j] && on_line[k]) return true;
        std::set<std::size_t> t{i, j, k};
        for (const auto& c : cert)
            if (std::includes(c.begin(), c.end(), t.begin(), t.end())) return true;
        return false;
    }
};

}  // namespace

Gadget build_gadget(GadgetKind kind, const LineBasis& basis, const Scalar& x, const Scalar& y,
                    const std::vector<ForbiddenLine>& forbidden_lines,
                    const std::vector<Vec>& forbidden_points, std::uint64_t seed) {
    Scalar res = result_value(kind, x, y);
    SlotAssign sl = slots_for(kind, x, y);
    auto bx = basis.param_point(x);
    auto by = basis.param_point(y);
    auto bres = basis.param_point(res);
    if (!bx.is_affine() || !by.is_affine() || !bres.is_affine())
        throw precondition_error("gadget operand or result lies at infinity");
    if (sl.result_in_blue2 && bx == by)
        throw precondition_error("rewired gadget needs distinct operand points");

    ProjectivePoint blue1 = by;
    ProjectivePoint known = bx;  // occupies blue2 (normal) or gslot (rewired)
    RatRng rng(seed);
    for (unsigned attempt = 0; attempt < 1024; ++attempt) {
        unsigned bits = 20 + (attempt / 64);  // grid refinement after rejections
        auto geom = sample_geometry(basis, sl, blue1, known, res, rng, bits);
        if (!geom) continue;

        // assemble labeled points in construction order
        std::vector<std::pair<Label, Vec>> pts;
        pts.emplace_back("b0", basis.b0.affine());
        if (sl.mul_layout) pts.emplace_back("b1", basis.b1.affine());
        pts.emplace_back("binf", basis.b_inf.affine());
        pts.emplace_back("x", bx.affine());
        pts.emplace_back("y", by.affine());
        pts.emplace_back("A", geom->A);
        pts.emplace_back("C", geom->C);
        pts.emplace_back("B", geom->B);
        pts.emplace_back("D", geom->D);
        pts.emplace_back("g", geom->result);

        GadgetRecord rec;
        rec.kind = kind;
        rec.mul_layout = sl.mul_layout;
        rec.b0 = "b0";
        rec.b1 = sl.mul_layout ? "b1" : "";
        rec.binf = "binf";
        rec.blue1 = "y";
        rec.blue2 = sl.result_in_blue2 ? "g" : "x";
        rec.gslot = sl.result_in_blue2 ? "x" : "g";
        rec.yA = "A";
        rec.yB = "B";
        rec.yC = "C";
        rec.yD = "D";
        rec.result = "g";
        rec.value = res;

        // expected-collinearity structure over the gadget's own points
        ExpectedTriples et;
        std::map<Label, std::size_t> pid;
        for (auto& [l, v] : pts) pid[l] = et.id_of(v);
        et.on_line.assign(et.positions.size(), false);
        for (const auto& l : {Label("b0"), Label("binf"), Label("x"), Label("y"), Label("g")})
            et.on_line[pid[l]] = true;
        if (sl.mul_layout) et.on_line[pid["b1"]] = true;
        for (const auto& tr : rec.triples())
            et.cert.push_back({pid[tr[0]], pid[tr[1]], pid[tr[2]]});

        bool ok = true;
        for (std::size_t i = 0; i < pts.size() && ok; ++i)
            for (std::size_t j = i + 1; j < pts.size() && ok; ++j)
                for (std::size_t k = j + 1; k < pts.size() && ok; ++k) {
                    bool col = collinear_exact(pts[i].second, pts[j].second, pts[k].second);
                    bool exp =
                        et.expected(pid[pts[i].first], pid[pts[j].first], pid[pts[k].first]);
                    if (col != exp) ok = false;
                }
        if (!ok) continue;

        // genericity against the forbidden sets
        const Vec* yellows[4] = {&geom->A, &geom->B, &geom->C, &geom->D};
        for (const auto& fl : forbidden_lines)
            for (const auto* yp : yellows)
                if (dot(fl.normal, *yp) == fl.offset) ok = false;
        if (!ok) continue;
        for (const auto& s : forbidden_points) {
            if (!ok) break;
            // only points outside the gadget line and roles constrain
            if (collinear_exact(basis.b0.affine(), basis.b_inf.affine(), s)) continue;
            bool is_role = false;
            for (auto& [l, v] : pts) is_role = is_role || v == s;
            if (is_role) continue;
            for (int i = 0; i < 4 && ok; ++i)
                for (int j = i + 1; j < 4 && ok; ++j)
                    if (collinear_exact(s, *yellows[i], *yellows[j])) ok = false;
        }
        if (!ok) continue;

        Gadget g;
        g.kind = kind;
        g.points = Configuration(2, std::move(pts));
        g.red0 = "b0";
        g.red1 = sl.mul_layout ? "b1" : "";
        g.redinf = "binf";
        g.blue_x = "x";
        g.blue_y = "y";
        g.green = "g";
        g.yellow = {"A", "B", "C", "D"};
        for (const auto& tr : rec.triples()) g.collinear_triples.push_back(tr);
        g.x = x;
        g.y = y;
        g.result = res;
        g.mul_layout = sl.mul_layout;
        g.slot_blue1 = rec.blue1;
        g.slot_blue2 = rec.blue2;
        g.slot_gslot = rec.gslot;
        return g;
    }
    throw error("gadget sampling exhausted");
}

void ConstructibleExtension::validate() const {
    record.validate();
    std::set<Label> added(order.begin(), order.end());
    for (const auto& l : record.extended.labels())
        if (!record.base.contains(l) && !added.count(l))
            throw error("added label missing from the construction order");
    for (const auto& [l, c] : incident_lines)
        if (c > 2) throw error("added point lies on more than two prior lines");
}

namespace {

Label fresh_label(const Configuration& c, std::string base) {
    while (c.contains(base)) base += "_";
    return base;
}

}  // namespace

ConstructibleExtension constructible_extension(const Configuration& p, const Label& l0,
                                               const Label& l1, const Label& linf, const Scalar& g,
                                               const Scalar& f, std::uint64_t seed) {
    return constructible_extension(p, l0, l1, linf, g, f, seed, {}, {});
}

ConstructibleExtension constructible_extension(const Configuration& p, const Label& l0,
                                               const Label& l1, const Label& linf, const Scalar& g,
                                               const Scalar& f, std::uint64_t seed,
                                               const std::map<Scalar, Label>& reuse,
                                               const std::set<Scalar>& extra_forbidden) {
    if (l0 == l1 || l0 == linf || l1 == linf)
        throw precondition_error("anchor labels must be distinct");
    auto p0 = ProjectivePoint::from_affine(p.point(l0));
    auto p1 = ProjectivePoint::from_affine(p.point(l1));
    auto pinf = ProjectivePoint::from_affine(p.point(linf));
    if (p0 == p1 || p0 == pinf || p1 == pinf)
        throw precondition_error("anchor points must be distinct");
    if (!collinear(p0, p1, pinf)) throw precondition_error("anchor points must be collinear");
    LineBasis lb(p0, p1, pinf);
    // the forbidden parameter must not be realized in P
    for (const auto& l : p.labels()) {
        auto q = ProjectivePoint::from_affine(p.point(l));
        if (!lb.contains(q)) continue;
        auto t = lb.param_of(q);
        if (t && *t == f) throw precondition_error("P already contains the forbidden point");
    }

    if (f == 0 || f == 1 || f == g)
        throw precondition_error("forbidden value must differ from 0, 1 and the goal");
    // the parameter of the line's point at infinity must also be avoided,
    // since an affine configuration cannot contain that point
    auto omega = lb.param_of(ProjectivePoint::at_infinity(pinf.affine() - p0.affine()));
    if (!omega) throw error("line basis maps no parameter to infinity");
    if (*omega == g)
        throw precondition_error("goal parameter lies at infinity in this basis");
    std::set<Scalar> forb{f, *omega};
    for (const auto& v : extra_forbidden) {
        if (v == g) throw precondition_error("goal parameter is forbidden");
        if (v == 0 || v == 1) continue;  // anchors are always available
        forb.insert(v);
    }
    std::map<Scalar, Label> pinned;
    for (const auto& [v, l] : reuse) {
        if (!p.contains(l)) throw precondition_error("reuse label not in configuration");
        auto pt = lb.param_point(v);
        if (!pt.is_affine() || ProjectivePoint::from_affine(p.point(l)) != pt)
            throw precondition_error("reuse label is not at its declared parameter");
        pinned.emplace(v, l);
    }
    pinned.emplace(Scalar(0), l0);
    pinned.emplace(Scalar(1), l1);

    ConstructibleExtension ext;
    ext.p0 = l0;
    ext.p1 = l1;
    ext.pinf = linf;
    ext.goal = g;
    ext.forbidden = f;
    ext.seq = sequence_avoiding_set(g, forb);
    ext.record.base = p;

    Configuration cur = p;
    std::map<std::size_t, Label> term_label{{0, l0}, {1, l1}};

    for (std::size_t i = 0; i < ext.seq.steps.size(); ++i) {
        const auto& st = ext.seq.steps[i];
        const Scalar& a = ext.seq.terms[st.s];
        const Scalar& b = ext.seq.terms[st.t];
        const Scalar& v = ext.seq.terms[i + 2];
        if (auto it = pinned.find(v); it != pinned.end()) {
            // the value is already pinned by an earlier gadget or certificate
            term_label[i + 2] = it->second;
            continue;
        }
        GadgetKind kind;
        switch (st.op) {
            case '+': kind = GadgetKind::add; break;
            case '-': kind = GadgetKind::sub; break;
            case '*': kind = GadgetKind::mul; break;
            default: kind = GadgetKind::divide; break;
        }
        SlotAssign sl = slots_for(kind, a, b);
        auto blue1 = lb.param_point(b);
        auto known = lb.param_point(a);
        if (!blue1.is_affine() || !known.is_affine())
            throw error("intermediate construction point at infinity");
        Label lab_a = term_label.count(st.s) ? term_label[st.s] : Label();
        Label lab_b = term_label.count(st.t) ? term_label[st.t] : Label();
        if (lab_a.empty() || lab_b.empty()) throw error("operand label missing");

        std::string pref = "~" + std::to_string(i + 2);
        Label lA = fresh_label(cur, pref + "A");
        Label lB = fresh_label(cur, pref + "B");
        Label lC = fresh_label(cur, pref + "C");
        Label lD = fresh_label(cur, pref + "D");
        Label lV = fresh_label(cur, pref + "v");

        RatRng rng(seed * 0x9e3779b97f4a7c15ull + i + 1);
        bool placed = false;
        for (unsigned attempt = 0; attempt < 1024 && !placed; ++attempt) {
            unsigned bits = 20 + (attempt / 64);
            auto geom = sample_geometry(lb, sl, blue1, known, v, rng, bits);
            if (!geom) continue;

            // genericity against the current configuration:
            // (1) no two current points (distinct positions) collinear with a
            //     yellow; (2) the result meets no spanned line besides l
            const Vec* news[5] = {&geom->A, &geom->B, &geom->C, &geom->D, &geom->result};
            bool ok = true;
            for (int yi = 0; yi < 4 && ok; ++yi) {
                const Vec& yv = *news[yi];
                std::map<std::pair<bool, Scalar>, Vec> slopes;
                for (const auto& wl : cur.labels()) {
                    const Vec& w = cur.point(wl);
                    if (w == yv) {
                        ok = false;  // yellow coincides with a current point
                        break;
                    }
                    Scalar dx = w[0] - yv[0], dy = w[1] - yv[1];
                    std::pair<bool, Scalar> key =
                        dx != 0 ? std::make_pair(false, Scalar(dy / dx))
                                : std::make_pair(true, Scalar(0));
                    auto it = slopes.find(key);
                    if (it == slopes.end())
                        slopes.emplace(std::move(key), w);
                    else if (it->second != w) {
                        ok = false;  // yellow on a spanned line
                        break;
                    }
                }
            }
            if (!ok) continue;
            {
                const Vec& rv = geom->result;
                // a result coinciding with an existing on-line point adds no
                // new incidences, so the spanned-line check does not apply
                bool dup = false;
                for (const auto& wl : cur.labels()) dup = dup || cur.point(wl) == rv;
                std::map<std::pair<bool, Scalar>, Vec> slopes;
                for (const auto& wl : cur.labels()) {
                    if (dup) break;
                    const Vec& w = cur.point(wl);
                    if (w == rv) continue;  // coincidence with an on-line point
                    if (collinear_exact(lb.b0.affine(), lb.b_inf.affine(), w))
                        continue;  // l itself is an allowed spanned line
                    Scalar dx = w[0] - rv[0], dy = w[1] - rv[1];
                    std::pair<bool, Scalar> key =
                        dx != 0 ? std::make_pair(false, Scalar(dy / dx))
                                : std::make_pair(true, Scalar(0));
                    auto it = slopes.find(key);
                    if (it == slopes.end())
                        slopes.emplace(std::move(key), w);
                    else if (it->second != w) {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) continue;
            // (3) no current point collinear with two new points, except the
            //     certificate lines through the slot occupants
            GadgetRecord rec;
            rec.kind = kind;
            rec.mul_layout = sl.mul_layout;
            rec.b0 = l0;
            rec.b1 = sl.mul_layout ? l1 : Label();
            rec.binf = linf;
            rec.blue1 = lab_b;
            rec.blue2 = sl.result_in_blue2 ? lV : lab_a;
            rec.gslot = sl.result_in_blue2 ? lab_a : lV;
            rec.yA = lA;
            rec.yB = lB;
            rec.yC = lC;
            rec.yD = lD;
            rec.result = lV;
            rec.value = v;

            // expected structure by positions
            ExpectedTriples et;
            auto pos_of = [&](const Label& l) -> const Vec& {
                if (l == lA) return geom->A;
                if (l == lB) return geom->B;
                if (l == lC) return geom->C;
                if (l == lD) return geom->D;
                if (l == lV) return geom->result;
                return cur.point(l);
            };
            for (const auto& tr : rec.triples())
                et.cert.push_back(
                    {et.id_of(pos_of(tr[0])), et.id_of(pos_of(tr[1])), et.id_of(pos_of(tr[2]))});

            auto expected_triple = [&](const Vec& u, const Vec& vv, const Vec& w) {
                if (u == vv || vv == w || u == w) return true;
                const Vec b0a = lb.b0.affine(), binfa = lb.b_inf.affine();
                if (collinear_exact(b0a, binfa, u) && collinear_exact(b0a, binfa, vv) &&
                    collinear_exact(b0a, binfa, w))
                    return true;
                std::vector<std::size_t> ids;
                for (const Vec* q : {&u, &vv, &w}) {
                    bool foundid = false;
                    for (std::size_t ii = 0; ii < et.positions.size(); ++ii)
                        if (et.positions[ii] == *q) {
                            ids.push_back(ii);
                            foundid = true;
                            break;
                        }
                    if (!foundid) return false;  // involves a point off the gadget
                }
                std::set<std::size_t> t(ids.begin(), ids.end());
                for (const auto& cset : et.cert)
                    if (std::includes(cset.begin(), cset.end(), t.begin(), t.end())) return true;
                return false;
            };

            for (const auto& wl : cur.labels()) {
                if (!ok) break;
                const Vec& w = cur.point(wl);
                for (int i1 = 0; i1 < 5 && ok; ++i1)
                    for (int i2 = i1 + 1; i2 < 5 && ok; ++i2)
                        if (collinear_exact(w, *news[i1], *news[i2]) &&
                            !expected_triple(w, *news[i1], *news[i2]))
                            ok = false;
            }
            if (!ok) continue;
            // (4) within-gadget collinearities are exactly the expected ones
            std::vector<const Vec*> gpts;
            std::vector<Label> glabels{l0, linf, lab_a, lab_b, lA, lB, lC, lD, lV};
            if (sl.mul_layout) glabels.insert(glabels.begin() + 2, l1);
            std::sort(glabels.begin(), glabels.end());
            glabels.erase(std::unique(glabels.begin(), glabels.end()), glabels.end());
            for (const auto& l : glabels) gpts.push_back(&pos_of(l));
            for (std::size_t i1 = 0; i1 < gpts.size() && ok; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < gpts.size() && ok; ++i2)
                    for (std::size_t i3 = i2 + 1; i3 < gpts.size() && ok; ++i3) {
                        bool col = collinear_exact(*gpts[i1], *gpts[i2], *gpts[i3]);
                        if (col != expected_triple(*gpts[i1], *gpts[i2], *gpts[i3])) ok = false;
                    }
            if (!ok) continue;

            // accept
            cur.add_point(lA, geom->A);
            cur.add_point(lC, geom->C);
            cur.add_point(lB, geom->B);
            cur.add_point(lD, geom->D);
            cur.add_point(lV, geom->result);
            ext.order.insert(ext.order.end(), {lA, lC, lB, lD, lV});
            ext.incident_lines[lA] = 0;
            ext.incident_lines[lC] = 1;
            ext.incident_lines[lB] = 2;
            ext.incident_lines[lD] = 2;
            ext.incident_lines[lV] = 2;
            ext.gadgets.push_back(std::move(rec));
            term_label[i + 2] = lV;
            pinned.emplace(v, lV);
            placed = true;
        }
        if (!placed)
            throw error("gadget sampling exhausted at step " + std::to_string(i) + " op " +
                        std::string(1, st.op) + " a=" + to_string(a) + " b=" + to_string(b));
    }

    ext.goal_label = term_label.at(ext.seq.terms.size() - 1);
    ext.record.extended = cur;
    ext.record.generic = false;
    return ext;
}

std::map<Label, ProjectivePoint> replay_rigidity(const ConstructibleExtension& ext,
                                                 const Configuration& q) {
    auto pp = [&](const Label& l) { return ProjectivePoint::from_affine(q.point(l)); };
    std::optional<LineBasis> lbq;
    try {
        lbq.emplace(pp(ext.p0), pp(ext.p1), pp(ext.pinf));
    } catch (const error& e) {
        throw certificate_error(std::string("anchor basis invalid in replay: ") + e.what());
    }
    std::map<Label, ProjectivePoint> forced;
    for (const auto& rec : ext.gadgets) {
        for (const auto& tr : rec.triples()) {
            if (!collinear(pp(tr[0]), pp(tr[1]), pp(tr[2])))
                throw certificate_error("gadget collinearity broken at " + tr[0] + "," + tr[1] +
                                        "," + tr[2]);
        }
        for (const auto& yl : {rec.yA, rec.yB, rec.yC, rec.yD})
            if (lbq->contains(pp(yl)))
                throw certificate_error("yellow point degenerated onto the line: " + yl);
        ProjectivePoint want = lbq->param_point(rec.value);
        if (!want.is_affine())
            throw certificate_error("forced position at infinity for label " + rec.result);
        if (pp(rec.result) != want)
            throw certificate_error("forced point mismatch for label " + rec.result);
        forced.emplace(rec.result, want);
    }
    return forced;
}

}  // namespace chiro
