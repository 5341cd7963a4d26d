#pragma once

#include <array>
#include <set>

#include "chiro/chirotope.hpp"

namespace chiro {

// One derivation step u_i = u_s op u_t (for terms of index >= 2).
struct ArithStep {
    std::size_t s = 0, t = 0;
    char op = '+';  // one of + - * /
};

// Sequence u_0=0, u_1=1, ..., u_{k+1}=g with each later term derived from
// two earlier ones by a field operation (second operand nonzero).
struct ArithmeticSequence {
    std::vector<Scalar> terms;     // u_0 .. u_{k+1}
    std::vector<ArithStep> steps;  // steps[i] produces terms[i+2]

    std::size_t k() const { return terms.size() >= 2 ? terms.size() - 2 : 0; }
    const Scalar& goal() const { return terms.back(); }
    // Checks the defining conditions; if avoid is set, also that no term
    // equals it.
    void validate(const std::optional<Scalar>& avoid = std::nullopt) const;
};

// Double-and-add construction; no term equals f. Requires f not in {0,1,g}.
ArithmeticSequence arithmetic_sequence_for(const Scalar& g, const Scalar& f);

// The same construction without forbidden-value avoidance.
ArithmeticSequence arithmetic_sequence_plain(const Scalar& g);

enum class GadgetKind { add, sub, mul, divide };

// A forbidden affine line {x : normal.x = offset} for yellow sampling.
struct ForbiddenLine {
    Vec normal;
    Scalar offset;
};

// A single Von Staudt gadget over its own label set. The roles name the
// operands (blue, parameters x and y) and the result (green); for the
// subtraction and division rewirings the result point occupies a blue slot
// of the underlying addition and multiplication layout.
struct Gadget {
    GadgetKind kind = GadgetKind::add;
    Configuration points;  // dim 2
    Label red0, red1, redinf;  // red1 empty unless the layout uses b1
    Label blue_x, blue_y;      // operand points b(x), b(y)
    Label green;               // result point, parameter x op y
    std::array<Label, 4> yellow;
    std::vector<std::array<Label, 3>> collinear_triples;
    Scalar x, y, result;
    bool mul_layout = false;
    // slot occupants of the layout (gslot is the point on line(B,D) and l)
    Label slot_blue1, slot_blue2, slot_gslot;
};

Gadget build_gadget(GadgetKind kind, const LineBasis& basis, const Scalar& x, const Scalar& y,
                    const std::vector<ForbiddenLine>& forbidden_lines,
                    const std::vector<Vec>& forbidden_points, std::uint64_t seed);

// One gadget inside a constructible extension, with labels of the host
// configuration.
struct GadgetRecord {
    GadgetKind kind = GadgetKind::add;
    bool mul_layout = false;
    Label b0, b1, binf;          // basis anchors (b1 empty for add layout)
    Label blue1, blue2, gslot;   // slot occupants
    Label yA, yB, yC, yD;
    Label result;                // the new on-line point among the slots
    Scalar value;                // forced parameter of the result

    std::vector<std::array<Label, 3>> triples() const;
};

struct ConstructibleExtension {
    ExtensionRecord record;
    Label p0, p1, pinf;
    Scalar goal, forbidden;
    Label goal_label;
    ArithmeticSequence seq;
    std::vector<GadgetRecord> gadgets;
    std::vector<Label> order;                     // added labels, construction order
    std::map<Label, std::size_t> incident_lines;  // lines spanned by earlier points

    void validate() const;  // structural checks (order, incidence bound)
};

// Lemma-style extension realizing p(g) on the line through p0 and p1 with
// basis (p0, p1, p_inf), avoiding the parameter f. Adds exactly 5k points.
ConstructibleExtension constructible_extension(const Configuration& p, const Label& p0,
                                               const Label& p1, const Label& pinf, const Scalar& g,
                                               const Scalar& f, std::uint64_t seed);

// As above, but stacking on previous constructions: `reuse` maps parameter
// values to labels of points of p already pinned at those parameters by an
// earlier certificate (such derivation steps then add no gadget), and
// `extra_forbidden` lists parameter values the derivation must avoid, e.g.
// parameters occupied by unpinned points of p.
ConstructibleExtension constructible_extension(const Configuration& p, const Label& p0,
                                               const Label& p1, const Label& pinf, const Scalar& g,
                                               const Scalar& f, std::uint64_t seed,
                                               const std::map<Scalar, Label>& reuse,
                                               const std::set<Scalar>& extra_forbidden);

// Gadget-by-gadget forced positions in Q's coordinates, for a Q with the
// same collinearities. Throws certificate_error on any mismatch.
std::map<Label, ProjectivePoint> replay_rigidity(const ConstructibleExtension& ext,
                                                 const Configuration& q);

}  // namespace chiro
