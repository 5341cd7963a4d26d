#include "chiro/incidence.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace chiro {

std::uint64_t ModFilter::add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    if (s >= p_ || s < a) s -= p_;
    return s;
}

std::uint64_t ModFilter::sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
}

std::uint64_t ModFilter::mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p_);
}

std::uint64_t ModFilter::inv(std::uint64_t a) const {
    if (a == 0) throw error("modular inverse of zero");
    // extended euclid
    std::int64_t t = 0, nt = 1;
    std::uint64_t r = p_, nr = a;
    while (nr != 0) {
        std::uint64_t q = r / nr;
        std::int64_t t2 = t - static_cast<std::int64_t>(q) * nt;
        t = nt;
        nt = t2;
        std::uint64_t r2 = r - q * nr;
        r = nr;
        nr = r2;
    }
    if (r != 1) throw error("modular inverse does not exist");
    return t < 0 ? static_cast<std::uint64_t>(t + static_cast<std::int64_t>(p_)) : static_cast<std::uint64_t>(t);
}

std::optional<std::uint64_t> ModFilter::reduce(const Scalar& q) const {
    Integer pz(static_cast<unsigned long>(p_));
    Integer dn = q.get_den() % pz;
    if (dn == 0) return std::nullopt;
    Integer nm = q.get_num() % pz;
    std::uint64_t num = mpz_get_ui(nm.get_mpz_t());
    if (nm < 0) num = p_ - num;
    std::uint64_t den = mpz_get_ui(dn.get_mpz_t());
    return mul(num, inv(den));
}

std::optional<std::vector<std::uint64_t>> ModFilter::reduce_point(const Vec& v) const {
    std::vector<std::uint64_t> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        auto r = reduce(x);
        if (!r) return std::nullopt;
        out.push_back(*r);
    }
    return out;
}

bool collinear_exact(const Vec& a, const Vec& b, const Vec& c) {
    if (a.size() == 2)
        return (b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0]);
    return affine_rank({a, b, c}) <= 2;
}

namespace {

bool exact_violation(const std::vector<Vec>& pts, std::size_t q,
                     const std::vector<std::size_t>& span) {
    std::vector<Vec> s;
    for (auto i : span) s.push_back(pts[i]);
    if (!affinely_independent(s)) return false;
    s.push_back(pts[q]);
    return !affinely_independent(s);
}

// Appends a confirmed violation; returns false when the cap is reached.
bool record(ExtensionGenericityReport& rep, std::size_t q, std::vector<std::size_t> span,
            std::size_t cap) {
    rep.generic = false;
    if (rep.violations.size() >= cap) return false;
    std::vector<std::size_t> v{q};
    v.insert(v.end(), span.begin(), span.end());
    rep.violations.push_back(std::move(v));
    return rep.violations.size() < cap;
}

// Checks whether q (added) lies on a hyperplane spanned by d independent
// points of the exactly-confirmed coplanar candidate set.
bool violation_in_flat_set(const std::vector<Vec>& pts, std::size_t q,
                           const std::vector<std::size_t>& flat_set, std::size_t d,
                           std::vector<std::size_t>& span_out) {
    // greedily collect d affinely independent points of the set
    std::vector<Vec> s;
    std::vector<std::size_t> span;
    for (auto i : flat_set) {
        if (i == q) continue;
        std::vector<Vec> cand = s;
        cand.push_back(pts[i]);
        if (affinely_independent(cand)) {
            s = std::move(cand);
            span.push_back(i);
            if (span.size() == d) break;
        }
    }
    if (span.size() != d) return false;
    if (!exact_violation(pts, q, span)) return false;
    span_out = span;
    return true;
}

void brute_force(const std::vector<Vec>& pts, const std::vector<bool>& added, std::size_t d,
                 std::size_t cap, ExtensionGenericityReport& rep) {
    std::size_t n = pts.size();
    std::vector<std::size_t> idx(d + 1);
    // all (d+1)-subsets via odometer
    std::vector<std::size_t> c(d + 1);
    for (std::size_t i = 0; i <= d; ++i) c[i] = i;
    if (n < d + 1) return;
    while (true) {
        bool any_added = false;
        for (auto i : c) any_added = any_added || added[i];
        if (any_added) {
            std::vector<Vec> tup;
            for (auto i : c) tup.push_back(pts[i]);
            if (!affinely_independent(tup)) {
                for (std::size_t j = 0; j <= d; ++j) {
                    if (!added[c[j]]) continue;
                    std::vector<std::size_t> span;
                    for (std::size_t i = 0; i <= d; ++i)
                        if (i != j) span.push_back(c[i]);
                    if (exact_violation(pts, c[j], span)) {
                        if (!record(rep, c[j], span, cap)) return;
                        break;
                    }
                }
            }
        }
        std::size_t i = d + 1;
        bool done = true;
        while (i-- > 0) {
            if (c[i] + (d + 1 - i) < n) {
                ++c[i];
                for (std::size_t j = i + 1; j <= d; ++j) c[j] = c[j - 1] + 1;
                done = false;
                break;
            }
        }
        if (done) return;
    }
}

// Coincidence scan shared by the fast paths: an added point equal to any
// other point lies on every spanned hyperplane through that point.
bool coincidence_scan(const std::vector<Vec>& pts, const std::vector<bool>& added, std::size_t d,
                      std::size_t cap, ExtensionGenericityReport& rep) {
    std::map<Vec, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) groups[pts[i]].push_back(i);
    for (auto& [v, g] : groups) {
        if (g.size() < 2) continue;
        for (auto q : g) {
            if (!added[q]) continue;
            // complete the coincident partner to d independent spanners
            std::size_t partner = g[0] == q ? g[1] : g[0];
            std::vector<std::size_t> span{partner};
            std::vector<Vec> s{pts[partner]};
            for (std::size_t i = 0; i < pts.size() && span.size() < d; ++i) {
                if (i == q || i == partner) continue;
                std::vector<Vec> cand = s;
                cand.push_back(pts[i]);
                if (affinely_independent(cand)) {
                    s = std::move(cand);
                    span.push_back(i);
                }
            }
            if (span.size() == d && exact_violation(pts, q, span)) {
                if (!record(rep, q, span, cap)) return false;
            }
        }
    }
    return true;
}

// Reduces every point mod a prime for which all denominators are units.
std::vector<std::vector<std::uint64_t>> reduce_all(const std::vector<Vec>& pts, ModFilter& f_out) {
    static const std::uint64_t primes[] = {4611686018427387847ull, 4611686018427387817ull,
                                           4611686018427387787ull, 4611686018427387761ull};
    for (auto p : primes) {
        ModFilter f(p);
        std::vector<std::vector<std::uint64_t>> red;
        red.reserve(pts.size());
        bool ok = true;
        for (const auto& pt : pts) {
            auto r = f.reduce_point(pt);
            if (!r) {
                ok = false;
                break;
            }
            red.push_back(std::move(*r));
        }
        if (ok) {
            f_out = f;
            return red;
        }
    }
    return {};  // caller falls back to brute force
}

void fast_planar(const std::vector<Vec>& pts, const std::vector<bool>& added, std::size_t cap,
                 ExtensionGenericityReport& rep) {
    if (!coincidence_scan(pts, added, 2, cap, rep)) return;
    ModFilter f;
    auto red = reduce_all(pts, f);
    std::size_t n = pts.size();
    if (red.empty()) {
        brute_force(pts, added, 2, cap, rep);
        return;
    }
    for (std::size_t a = 0; a < n; ++a) {
        // bucket all other points by slope mod p as seen from the anchor
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::size_t>> buckets;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            std::uint64_t dx = f.sub(red[b][0], red[a][0]);
            std::uint64_t dy = f.sub(red[b][1], red[a][1]);
            if (dx == 0 && dy == 0) {
                if (pts[b] == pts[a]) continue;  // coincidences handled above
                // mod-collapsed but distinct: screen this pair exhaustively
                for (std::size_t y = 0; y < n; ++y) {
                    if (y == a || y == b) continue;
                    if (!collinear_exact(pts[a], pts[b], pts[y])) continue;
                    std::vector<std::size_t> line{a, b, y};
                    for (auto q : line) {
                        if (!added[q]) continue;
                        std::vector<std::size_t> span;
                        if (violation_in_flat_set(pts, q, line, 2, span)) {
                            if (!record(rep, q, span, cap)) return;
                        }
                    }
                }
                continue;
            }
            // canonical direction: scale so the first nonzero entry is 1
            if (dx != 0)
                buckets[{0, f.mul(dy, f.inv(dx))}].push_back(b);
            else
                buckets[{1, 0}].push_back(b);
        }
        for (auto& [key, g] : buckets) {
            if (g.size() < 2) continue;
            const std::vector<std::size_t>& cand = g;
            // exact confirmation: regroup the candidates by exact direction
            std::map<std::pair<bool, Scalar>, std::vector<std::size_t>> exact;
            for (auto b : cand) {
                Scalar dx = pts[b][0] - pts[a][0], dy = pts[b][1] - pts[a][1];
                if (dx == 0 && dy == 0) continue;
                if (dx != 0)
                    exact[{false, dy / dx}].push_back(b);
                else
                    exact[{true, Scalar(0)}].push_back(b);
            }
            for (auto& [dir, members] : exact) {
                if (members.size() < 2) continue;
                std::vector<std::size_t> line{a};
                line.insert(line.end(), members.begin(), members.end());
                for (auto q : line) {
                    if (!added[q]) continue;
                    std::vector<std::size_t> span;
                    if (violation_in_flat_set(pts, q, line, 2, span)) {
                        if (!record(rep, q, span, cap)) return;
                    }
                }
            }
        }
    }
}

void fast_spatial(const std::vector<Vec>& pts, const std::vector<bool>& added, std::size_t cap,
                  ExtensionGenericityReport& rep) {
    if (!coincidence_scan(pts, added, 3, cap, rep)) return;
    ModFilter f;
    auto red = reduce_all(pts, f);
    std::size_t n = pts.size();
    if (red.empty()) {
        brute_force(pts, added, 3, cap, rep);
        return;
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (pts[a] == pts[b]) continue;  // coincidences handled above
            std::map<std::array<std::uint64_t, 3>, std::vector<std::size_t>> buckets;
            std::vector<std::size_t> on_line;  // collinear with the anchors mod p
            std::array<std::uint64_t, 3> u{f.sub(red[b][0], red[a][0]),
                                           f.sub(red[b][1], red[a][1]),
                                           f.sub(red[b][2], red[a][2])};
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                std::array<std::uint64_t, 3> v{f.sub(red[c][0], red[a][0]),
                                               f.sub(red[c][1], red[a][1]),
                                               f.sub(red[c][2], red[a][2])};
                std::array<std::uint64_t, 3> nrm{f.sub(f.mul(u[1], v[2]), f.mul(u[2], v[1])),
                                                 f.sub(f.mul(u[2], v[0]), f.mul(u[0], v[2])),
                                                 f.sub(f.mul(u[0], v[1]), f.mul(u[1], v[0]))};
                if (nrm[0] == 0 && nrm[1] == 0 && nrm[2] == 0) {
                    on_line.push_back(c);
                    continue;
                }
                // canonical scale
                for (int k = 0; k < 3; ++k)
                    if (nrm[k] != 0) {
                        std::uint64_t s = f.inv(nrm[k]);
                        for (int j = 0; j < 3; ++j) nrm[j] = f.mul(nrm[j], s);
                        break;
                    }
                buckets[nrm].push_back(c);
            }
            // mod-collinear with the anchor pair: a true incidence here means
            // (a,b,c,e) is degenerate for every e, so screen these against
            // every fourth point; false hits are rare so this stays cheap
            for (auto c : on_line) {
                bool truly = affine_rank({pts[a], pts[b], pts[c]}) <= 2;
                for (std::size_t e = 0; e < n; ++e) {
                    if (e == a || e == b || e == c) continue;
                    if (truly) {
                        // need a fourth point off the line as hyperplane witness
                        if (affine_rank({pts[a], pts[b], pts[e]}) <= 2) continue;
                    } else if (affine_rank({pts[a], pts[b], pts[c], pts[e]}) > 3) {
                        continue;
                    }
                    std::vector<std::size_t> flat{a, b, c, e};
                    for (auto q : flat) {
                        if (!added[q]) continue;
                        std::vector<std::size_t> span;
                        if (violation_in_flat_set(pts, q, flat, 3, span)) {
                            if (!record(rep, q, span, cap)) return;
                        }
                    }
                    if (truly) break;  // one independent fourth point suffices
                }
            }
            for (auto& [key, g] : buckets) {
                if (g.size() < 2) continue;
                // exact confirmation: regroup candidates by exact normal
                std::map<std::pair<Vec, Scalar>, std::vector<std::size_t>> exact;
                for (auto c : g) {
                    auto hp = hyperplane_through({pts[a], pts[b], pts[c]});
                    if (!hp) continue;  // degenerate triple, caught elsewhere
                    Vec nrm = hp->first;
                    Scalar off = hp->second, lead(0);
                    for (const auto& x : nrm)
                        if (x != 0) {
                            lead = x;
                            break;
                        }
                    for (auto& x : nrm) x /= lead;
                    off /= lead;
                    exact[{std::move(nrm), std::move(off)}].push_back(c);
                }
                for (auto& [hp, members] : exact) {
                    if (members.size() < 2) continue;
                    std::vector<std::size_t> flat{a, b};
                    flat.insert(flat.end(), members.begin(), members.end());
                    for (auto q : flat) {
                        if (!added[q]) continue;
                        std::vector<std::size_t> span;
                        if (violation_in_flat_set(pts, q, flat, 3, span)) {
                            if (!record(rep, q, span, cap)) return;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

ExtensionGenericityReport check_generic_extension(const std::vector<Vec>& pts,
                                                  const std::vector<bool>& added, std::size_t d,
                                                  std::size_t max_violations) {
    if (pts.size() != added.size()) throw error("added-flag size mismatch");
    ExtensionGenericityReport rep;
    if (pts.size() <= d) return rep;
    // small instances: exact brute force; large planar/spatial: mod-p buckets
    bool small = pts.size() <= 24 || (d != 2 && d != 3);
    if (small)
        brute_force(pts, added, d, max_violations, rep);
    else if (d == 2)
        fast_planar(pts, added, max_violations, rep);
    else
        fast_spatial(pts, added, max_violations, rep);
    return rep;
}

bool is_generic_extension(const ExtensionRecord& er) {
    er.validate();
    std::vector<Vec> pts;
    std::vector<bool> added;
    for (const auto& l : er.extended.labels()) {
        pts.push_back(er.extended.point(l));
        added.push_back(!er.base.contains(l));
    }
    return check_generic_extension(pts, added, er.extended.dim()).generic;
}

std::vector<SpannedHyperplane> degenerate_hyperplanes(const std::vector<Vec>& pts, std::size_t d) {
    if (!pts.empty() && pts[0].size() != d) throw error("dimension mismatch");
    std::map<std::pair<Vec, Scalar>, std::set<std::size_t>> found;
    std::size_t n = pts.size();
    if (n < d + 1) return {};
    std::vector<std::size_t> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = i;
    while (true) {
        std::vector<Vec> tup;
        for (auto i : c) tup.push_back(pts[i]);
        auto hp = hyperplane_through(tup);
        if (hp) {
            // canonical scale: first nonzero normal entry positive, content 1
            Vec nrm = hp->first;
            Scalar off = hp->second;
            Scalar lead(0);
            for (const auto& x : nrm)
                if (x != 0) {
                    lead = x;
                    break;
                }
            for (auto& x : nrm) x /= lead;
            off /= lead;
            auto key = std::make_pair(nrm, off);
            auto it = found.find(key);
            if (it == found.end()) {
                std::set<std::size_t> members;
                for (std::size_t i = 0; i < n; ++i)
                    if (dot(nrm, pts[i]) == off) members.insert(i);
                if (members.size() >= d + 1) found.emplace(std::move(key), std::move(members));
            }
        }
        std::size_t i = d;
        bool done = true;
        while (i-- > 0) {
            if (c[i] + (d - i) < n) {
                ++c[i];
                for (std::size_t j = i + 1; j < d; ++j) c[j] = c[j - 1] + 1;
                done = false;
                break;
            }
        }
        if (done) break;
    }
    std::vector<SpannedHyperplane> out;
    for (auto& [key, members] : found) {
        SpannedHyperplane h;
        h.normal = key.first;
        h.offset = key.second;
        h.members.assign(members.begin(), members.end());
        out.push_back(std::move(h));
    }
    return out;
}

}  // namespace chiro
