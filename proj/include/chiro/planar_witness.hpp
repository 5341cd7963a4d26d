#pragma once

#include "chiro/vonstaudt.hpp"

namespace chiro {

// Signed-distance ratio xp1 / p0p1 for collinear points, equal to the
// parameter of the line's point at infinity in the basis (p0, p1, x).
Scalar omega(const Vec& p0, const Vec& p1, const Vec& x);

// Rational goals g- < omega(p) < g+ with 0 outside [g-, g+] and the interval
// contained in the omega-image of the epsilon-ball around p. The transcript
// derives both endpoints and bounds their arithmetic complexity.
struct GoalPair {
    Scalar g_minus, g_plus, omega_p;
    ArithmeticSequence transcript;
};

GoalPair choose_goals(const Vec& p0, const Vec& p1, const Vec& p, const Scalar& eps);

// Sign-flip certificate: in the witness extension the orientations of
// (anchor0, anchor2, m-) and (anchor0, anchor2, m+) differ; any chirotope
// re-realization on top of a far-away q would make them equal.
struct WitnessCertificate {
    Label anchor0, anchor1;  // line basis points used (after any role swap)
    Label p_label;           // the pinned point on the line
    Label anchor2;           // off-line reference point
    Label m_minus, m_plus;
    Sign sign_minus = 0, sign_plus = 0;
};

struct WitnessExtension {
    ExtensionRecord record;
    WitnessCertificate certificate;
    GoalPair goals;
    Scalar eps;
    bool degenerate = false;  // p coincides with an anchor: P itself suffices
    std::vector<Label> order;             // added labels in construction order
    ConstructibleExtension chain_minus, chain_plus;
};

WitnessExtension planar_witness(const Configuration& p, const Label& p0, const Label& p1,
                                const Label& pp, const Scalar& eps, std::uint64_t seed);

enum class Verdict { excluded, not_excluded };

// Checks whether a re-realization placing the pinned point at q (with
// off-line reference q2) is ruled out by the certificate.
Verdict check_certificate(const WitnessExtension& w, const ProjectivePoint& q,
                          const ProjectivePoint& q2);

}  // namespace chiro
