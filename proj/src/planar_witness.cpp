#include "chiro/planar_witness.hpp"

#include <algorithm>

namespace chiro {

Scalar omega(const Vec& p0, const Vec& p1, const Vec& x) {
    if (p0 == p1) throw precondition_error("basis points coincide");
    if (x == p0 || x == p1) throw precondition_error("point coincides with a basis point");
    if (!collinear(ProjectivePoint::from_affine(p0), ProjectivePoint::from_affine(p1),
                   ProjectivePoint::from_affine(x)))
        throw precondition_error("point is not on the line");
    // x = p0 + s (p1 - p0) gives xp1/p0p1 = 1 - s
    std::size_t i = 0;
    while (p1[i] == p0[i]) ++i;
    Scalar s = (x[i] - p0[i]) / (p1[i] - p0[i]);
    return 1 - s;
}

namespace {

// Appends derivation steps to an existing sequence, deduplicating by value.
struct SeqTail {
    ArithmeticSequence seq;
    std::map<Scalar, std::size_t> index;

    explicit SeqTail(ArithmeticSequence base) : seq(std::move(base)) {
        for (std::size_t i = 0; i < seq.terms.size(); ++i) index.emplace(seq.terms[i], i);
    }

    std::size_t emit(char op, std::size_t s, std::size_t t) {
        const Scalar& a = seq.terms[s];
        const Scalar& b = seq.terms[t];
        if (b == 0) throw error("second operand is zero");
        Scalar v;
        switch (op) {
            case '+': v = a + b; break;
            case '-': v = a - b; break;
            case '*': v = a * b; break;
            case '/': v = a / b; break;
            default: throw error("unknown operation");
        }
        auto it = index.find(v);
        if (it != index.end()) return it->second;
        seq.terms.push_back(std::move(v));
        seq.steps.push_back({s, t, op});
        index.emplace(seq.terms.back(), seq.terms.size() - 1);
        return seq.terms.size() - 1;
    }
};

}  // namespace

GoalPair choose_goals(const Vec& p0, const Vec& p1, const Vec& p, const Scalar& eps) {
    if (eps <= 0) throw precondition_error("epsilon must be positive");
    Scalar w = omega(p0, p1, p);
    if (w > rat(-1, 2) && w < rat(1, 2))
        throw precondition_error("omega in (-1/2, 1/2): swap the roles of the basis points");
    Integer a = round_nearest_away(w);
    if (a == 0) throw error("unexpected zero rounding");

    // conservative rational lower bound on eps / |p0 - p1|
    Scalar n2 = norm2(p1 - p0);
    Scalar delta = eps / sqrt_upper(n2, 48);

    SeqTail tail(arithmetic_sequence_plain(Scalar(a)));
    std::size_t ia = tail.index.at(Scalar(a));
    std::size_t i2 = tail.emit('+', 1, 1);

    // bisect [a - 1/2, a + 1/2] towards omega(p)
    Scalar lo = Scalar(a) - rat(1, 2), hi = Scalar(a) + rat(1, 2);
    std::size_t ilo = ia, ihi = ia;  // become valid after the first split
    Scalar h = 1;
    std::size_t ih = 1;
    bool first = true;
    while (first || h > delta) {
        ih = tail.emit('/', ih, i2);
        h = h / 2;
        if (first) {
            // midpoint of the initial interval is a itself
            if (w <= Scalar(a)) {
                ilo = tail.emit('-', ia, ih);
                lo = Scalar(a) - h;
                ihi = ia;
                hi = a;
            } else {
                ilo = ia;
                lo = a;
                ihi = tail.emit('+', ia, ih);
                hi = Scalar(a) + h;
            }
            first = false;
            continue;
        }
        Scalar mid = lo + h;
        std::size_t imid = tail.emit('+', ilo, ih);
        if (w <= mid) {
            ihi = imid;
            hi = mid;
        } else {
            ilo = imid;
            lo = mid;
        }
    }
    if (w == lo || w == hi) {
        // re-interiorize omega by recentering on the boundary endpoint
        ih = tail.emit('/', ih, i2);
        h = h / 2;
        std::size_t ic = w == lo ? ilo : ihi;
        const Scalar& c = w == lo ? lo : hi;
        ilo = tail.emit('-', ic, ih);
        ihi = tail.emit('+', ic, ih);
        Scalar nl = c - h, nh = c + h;
        lo = nl;
        hi = nh;
    }
    if (!(lo < w && w < hi)) throw error("bisection failed to bracket omega");
    if (lo <= 0 && hi >= 0) throw error("bisection interval contains zero");

    GoalPair gp;
    gp.g_minus = lo;
    gp.g_plus = hi;
    gp.omega_p = w;
    gp.transcript = std::move(tail.seq);
    gp.transcript.validate();
    return gp;
}

namespace {

Label fresh_label(const Configuration& c, std::string base) {
    while (c.contains(base)) base += "_";
    return base;
}

}  // namespace

WitnessExtension planar_witness(const Configuration& p, const Label& l0, const Label& l1,
                                const Label& lp, const Scalar& eps, std::uint64_t seed) {
    if (eps <= 0) throw precondition_error("epsilon must be positive");
    if (p.dim() != 2) throw precondition_error("planar witness requires a planar configuration");
    const Vec& v0 = p.point(l0);
    const Vec& v1 = p.point(l1);
    const Vec& vp = p.point(lp);
    if (v0 == v1) throw precondition_error("basis points coincide");

    WitnessExtension w;
    w.eps = eps;
    w.certificate.anchor0 = l0;
    w.certificate.anchor1 = l1;
    w.certificate.p_label = lp;

    if (vp == v0 || vp == v1) {
        // the pinned point coincides with an anchor: the base chirotope
        // itself cannot be re-realized with the pinned point moved
        w.degenerate = true;
        w.record.base = p;
        w.record.extended = p;
        w.record.generic = true;
        return w;
    }
    if (!collinear(ProjectivePoint::from_affine(v0), ProjectivePoint::from_affine(v1),
                   ProjectivePoint::from_affine(vp)))
        throw precondition_error("pinned point is not on the anchor line");

    // midpoints of the segments p0-p and p1-p guard against q hitting an
    // anchor
    Configuration cur = p;
    Label lm0 = fresh_label(cur, "mid0");
    cur.add_point(lm0, rat(1, 2) * (v0 + vp));
    Label lm1 = fresh_label(cur, "mid1");
    cur.add_point(lm1, rat(1, 2) * (v1 + vp));
    w.order.push_back(lm0);
    w.order.push_back(lm1);

    // swap roles if the signed ratio falls in (-1/2, 1/2); the two ratios
    // sum to 1, so at least one of them qualifies
    Label b0 = l0, b1 = l1;
    Scalar wp = omega(v0, v1, vp);
    if (wp > rat(-1, 2) && wp < rat(1, 2)) {
        std::swap(b0, b1);
        wp = omega(p.point(b0), p.point(b1), vp);
    }
    w.certificate.anchor0 = b0;
    w.certificate.anchor1 = b1;
    w.goals = choose_goals(p.point(b0), p.point(b1), vp, eps);

    // parameters occupied by base points on the line must not appear as
    // derivation values: those points stay fixed, so a construction point
    // on top of one would be degenerate beyond repair
    LineBasis lb(ProjectivePoint::from_affine(p.point(b0)),
                 ProjectivePoint::from_affine(p.point(b1)), ProjectivePoint::from_affine(vp));
    std::set<Scalar> occupied;
    for (const auto& l : p.labels()) {
        auto q = ProjectivePoint::from_affine(p.point(l));
        if (!lb.contains(q)) continue;
        auto t = lb.param_of(q);
        if (t && *t != 0 && *t != 1) occupied.insert(*t);
    }

    w.chain_minus =
        constructible_extension(cur, b0, b1, lp, w.goals.g_minus, wp, seed, {}, occupied);
    // the second chain reuses every value the first one already pinned, so
    // no two construction points ever coincide
    std::map<Scalar, Label> pinned;
    for (const auto& rec : w.chain_minus.gadgets) pinned.emplace(rec.value, rec.result);
    w.chain_plus = constructible_extension(w.chain_minus.record.extended, b0, b1, lp,
                                           w.goals.g_plus, wp, seed + 1, pinned, occupied);
    w.certificate.m_minus = w.chain_minus.goal_label;
    w.certificate.m_plus = w.chain_plus.goal_label;
    for (const auto& l : w.chain_minus.order) w.order.push_back(l);
    for (const auto& l : w.chain_plus.order) w.order.push_back(l);

    w.record.base = p;
    // list the midpoints last: a chain value may land on a midpoint, and a
    // later scattering pass removes the later twin of a coincident pair
    // first, which must be the midpoint for the gadget structure to peel off
    {
        const Configuration& full = w.chain_plus.record.extended;
        std::vector<std::pair<Label, Vec>> pts;
        for (const auto& l : full.labels())
            if (l != lm0 && l != lm1) pts.emplace_back(l, full.point(l));
        pts.emplace_back(lm0, full.point(lm0));
        pts.emplace_back(lm1, full.point(lm1));
        w.record.extended = Configuration(full.dim(), pts);
    }
    w.record.generic = false;
    w.record.validate();

    // pick an off-line reference point and record the sign flip
    const Configuration& ext = w.record.extended;
    auto on_line = [&](const Vec& x) {
        return collinear(ProjectivePoint::from_affine(p.point(b0)),
                         ProjectivePoint::from_affine(p.point(b1)),
                         ProjectivePoint::from_affine(x));
    };
    Label a2;
    for (const auto& l : p.labels())
        if (!on_line(p.point(l))) {
            a2 = l;
            break;
        }
    if (a2.empty())
        for (const auto& l : ext.labels())
            if (!on_line(ext.point(l))) {
                a2 = l;
                break;
            }
    if (a2.empty()) throw error("no off-line reference point available");
    w.certificate.anchor2 = a2;
    w.certificate.sign_minus =
        orientation({ext.point(b0), ext.point(a2), ext.point(w.certificate.m_minus)});
    w.certificate.sign_plus =
        orientation({ext.point(b0), ext.point(a2), ext.point(w.certificate.m_plus)});
    if (w.certificate.sign_minus == w.certificate.sign_plus)
        throw error("witness construction failed to produce a sign flip");
    return w;
}

Verdict check_certificate(const WitnessExtension& w, const ProjectivePoint& q,
                          const ProjectivePoint& q2) {
    const Configuration& base = w.record.base;
    auto p0 = ProjectivePoint::from_affine(base.point(w.certificate.anchor0));
    auto p1 = ProjectivePoint::from_affine(base.point(w.certificate.anchor1));
    if (w.degenerate) {
        auto pp = ProjectivePoint::from_affine(base.point(w.certificate.p_label));
        return q == pp ? Verdict::not_excluded : Verdict::excluded;
    }
    if (q == p0 || q == p1)
        throw precondition_error("q must differ from the anchor points");
    if (!collinear(p0, p1, q)) throw precondition_error("q must lie on the anchor line");

    LineBasis bq(p0, p1, q);
    auto bm = bq.param_point(w.goals.g_minus);
    auto bp = bq.param_point(w.goals.g_plus);
    // a forced point at infinity cannot appear in an affine re-realization
    if (!bm.is_affine() || !bp.is_affine()) return Verdict::excluded;
    Sign sm = orientation({p0, q2, bm});
    Sign sp = orientation({p0, q2, bp});
    return sm == sp ? Verdict::excluded : Verdict::not_excluded;
}

}  // namespace chiro
