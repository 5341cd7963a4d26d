#include "chiro/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "chiro/lp.hpp"

namespace chiro {

namespace {

// visits all k-subsets of {0..n-1}
template <typename F>
void combinations(std::size_t n, std::size_t k, F f) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        f(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct Hyperplane {
    Vec n;
    Scalar c;
    std::vector<double> nd;  // double approximations for cheap sign screening
    double cd = 0;
    bool screened = false;
};

Hyperplane make_hyperplane(Vec n, Scalar c) {
    Hyperplane h;
    h.n = std::move(n);
    h.c = std::move(c);
    bool ok = true;
    for (const auto& v : h.n) {
        double t = v.get_d();
        ok = ok && std::isfinite(t);
        h.nd.push_back(t);
    }
    h.cd = h.c.get_d();
    h.screened = ok && std::isfinite(h.cd);
    return h;
}

bool hyperplane_has(const Hyperplane& h, const Vec& x) { return dot(h.n, x) == h.c; }

// membership screened in double precision: a residual clearly larger than
// the rounding error bound proves the point off the hyperplane, everything
// else falls back to exact arithmetic
bool on_any(const std::vector<Hyperplane>& hs, const Vec& x) {
    std::vector<double> xd(x.size());
    bool okx = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xd[i] = x[i].get_d();
        okx = okx && std::isfinite(xd[i]);
    }
    for (const auto& h : hs) {
        if (okx && h.screened) {
            double v = -h.cd, mag = std::abs(h.cd);
            for (std::size_t i = 0; i < xd.size(); ++i) {
                double t = h.nd[i] * xd[i];
                v += t;
                mag += std::abs(t);
            }
            if (std::isfinite(v) && std::isfinite(mag) && std::abs(v) > 1e-12 * mag) continue;
        }
        if (hyperplane_has(h, x)) return true;
    }
    return false;
}

bool in_affine_hull(const std::vector<Vec>& span, const Vec& x) {
    if (span.size() == 1) return span[0] == x;
    if (span.size() == 2) {
        // double screen: a clearly nonzero 2x2 minor proves x off the line
        std::size_t d = x.size();
        std::vector<double> u(d), w(d), mu(d), mw(d);
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            double a = span[0][i].get_d(), b = span[1][i].get_d(), xi = x[i].get_d();
            ok = ok && std::isfinite(a) && std::isfinite(b) && std::isfinite(xi);
            u[i] = b - a;
            w[i] = xi - a;
            mu[i] = std::abs(a) + std::abs(b);
            mw[i] = std::abs(xi) + std::abs(a);
        }
        if (ok)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i + 1; j < d; ++j) {
                    double m = u[i] * w[j] - u[j] * w[i];
                    double mag = mu[i] * mw[j] + mu[j] * mw[i];
                    if (std::isfinite(m) && std::isfinite(mag) && std::abs(m) > 1e-12 * mag)
                        return false;
                }
    }
    auto w = span;
    w.push_back(x);
    return affine_rank(w) == span.size();
}

// rounds to the nearest multiple of the (power of two) grid step
Scalar snap_to(const Scalar& v, const Scalar& g) {
    return Scalar(round_nearest_away(v / g)) * g;
}

Label fresh_label(const Configuration& c, std::string base) {
    while (c.contains(base)) base += "_";
    return base;
}

Scalar cube_half(const Scalar& r2, std::size_t m) {
    unsigned bits = 48;
    for (;;) {
        Scalar h = sqrt_lower(r2 / Scalar(static_cast<unsigned long>(m)), bits);
        if (h > 0) return pow2_below(h);
        bits *= 2;
    }
}

// squared distance from x to the affine hull of an independent span
Scalar dist2_to_flat(const std::vector<Vec>& span, const Vec& x) {
    Vec w = x - span[0];
    std::size_t m = span.size() - 1;
    if (m == 0) return norm2(w);
    std::vector<Vec> u;
    for (std::size_t i = 1; i < span.size(); ++i) u.push_back(span[i] - span[0]);
    Mat gram(m, m);
    Vec rhs(m, Scalar(0));
    for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = dot(u[i], w);
        for (std::size_t j = 0; j < m; ++j) gram(i, j) = dot(u[i], u[j]);
    }
    auto alpha = solve(gram, rhs);
    if (!alpha) throw error("degenerate flat span");
    Scalar proj(0);
    for (std::size_t i = 0; i < m; ++i) proj += (*alpha)[i] * rhs[i];
    return norm2(w) - proj;
}

// Sampling data around ps against the points of rest: the ball radius (a
// quarter of the squared distance to the nearest spanned hyperplane or
// point missing ps, so in-ball samples stay in the same cell as ps), the
// spanned hyperplanes through ps, all spanned flats through ps, and the
// lower-dimensional spanned flats that cross the ball and so need exact
// avoidance.
struct BallData {
    Scalar r2;
    std::vector<Hyperplane> av;             // hyperplanes through ps
    std::vector<std::vector<Vec>> through;  // flats through ps, as spans
    std::vector<std::vector<Vec>> near;     // low-dim flats crossing the ball
};

BallData ball_data(const std::vector<Vec>& rest, std::size_t d, const Vec& ps) {
    BallData bd;
    bd.r2 = 1;
    bool found = false;
    auto consider = [&](Scalar d2) {
        if (!found || d2 < bd.r2) {
            bd.r2 = std::move(d2);
            found = true;
        }
    };
    if (d == 2) {
        // planar fast path: screen the line distances in double precision
        // and fall back to exact arithmetic only where the rounding error
        // bound cannot separate a pair from the current minimum
        std::size_t n = rest.size();
        std::vector<double> xs(n), ys(n), ax(n), ay(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rest[i][0].get_d();
            ys[i] = rest[i][1].get_d();
            ax[i] = std::abs(xs[i]);
            ay[i] = std::abs(ys[i]);
        }
        double px = ps[0].get_d(), py = ps[1].get_d();
        double apx = std::abs(px), apy = std::abs(py);
        for (std::size_t i = 0; i < n; ++i) {
            if (rest[i] == ps)
                bd.through.push_back({rest[i]});
            else
                consider(norm2(rest[i] - ps));
        }
        double best_ub = found ? bd.r2.get_d() * 1.001 + 1e-300 : 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = xs[j] - xs[i], dy = ys[j] - ys[i];
                double cross = dx * (py - ys[i]) - dy * (px - xs[i]);
                double cmag = (ax[j] + ax[i]) * (apy + ay[i]) + (ay[j] + ay[i]) * (apx + ax[i]);
                double clo = std::abs(cross) - 3e-15 * cmag;
                double sx = ax[i] + ax[j], sy = ay[i] + ay[j];
                double len_ub = dx * dx + dy * dy + 3e-15 * (sx * sx + sy * sy);
                if (found && clo > 0 && len_ub > 0 &&
                    clo * clo / len_ub * 0.999 > best_ub)
                    continue;
                Vec dv = rest[j] - rest[i];
                if (dv[0] == 0 && dv[1] == 0) continue;
                Scalar cr = dv[0] * (ps[1] - rest[i][1]) - dv[1] * (ps[0] - rest[i][0]);
                if (cr == 0) {
                    Vec nrm{Scalar(-dv[1]), Scalar(dv[0])};
                    Scalar off = dot(nrm, rest[i]);
                    bd.av.push_back(make_hyperplane(std::move(nrm), std::move(off)));
                    bd.through.push_back({rest[i], rest[j]});
                    continue;
                }
                consider(cr * cr / norm2(dv));
                best_ub = bd.r2.get_d() * 1.001 + 1e-300;
            }
        }
    } else if (d == 3) {
        // spatial fast path: screen line and plane distances in double
        // precision with conservative error bounds, falling back to exact
        // arithmetic only where the bounds cannot decide
        std::size_t n = rest.size();
        std::vector<std::array<double, 3>> xs(n), axs(n);
        std::vector<char> okp(n, 1);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 3; ++c) {
                xs[i][c] = rest[i][c].get_d();
                axs[i][c] = std::abs(xs[i][c]);
                okp[i] = okp[i] && std::isfinite(xs[i][c]);
            }
        double pd[3], apd[3];
        bool okps = true;
        for (std::size_t c = 0; c < 3; ++c) {
            pd[c] = ps[c].get_d();
            apd[c] = std::abs(pd[c]);
            okps = okps && std::isfinite(pd[c]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (rest[i] == ps)
                bd.through.push_back({rest[i]});
            else
                consider(norm2(rest[i] - ps));
        }
        double best_ub = found ? bd.r2.get_d() * 1.001 + 1e-300 : 0;
        auto clamp2 = [](double v, double e) {
            double t = std::abs(v) - e;
            return t > 0 ? t * t : 0.0;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (found && okps && okp[i] && okp[j] && okp[k]) {
                        double u1[3], m1[3], u2[3], m2[3], w[3], mw[3], cr[3], er[3];
                        for (std::size_t c = 0; c < 3; ++c) {
                            u1[c] = xs[j][c] - xs[i][c];
                            m1[c] = axs[j][c] + axs[i][c];
                            u2[c] = xs[k][c] - xs[i][c];
                            m2[c] = axs[k][c] + axs[i][c];
                            w[c] = pd[c] - xs[i][c];
                            mw[c] = apd[c] + axs[i][c];
                        }
                        double a2ub = 0, det = 0, mdet = 0;
                        for (std::size_t c = 0; c < 3; ++c) {
                            std::size_t a = (c + 1) % 3, b = (c + 2) % 3;
                            cr[c] = u1[a] * u2[b] - u1[b] * u2[a];
                            er[c] = 1e-12 * (m1[a] * m2[b] + m1[b] * m2[a]);
                            double cu = std::abs(cr[c]) + er[c];
                            a2ub += cu * cu;
                            det += cr[c] * w[c];
                            mdet += (std::abs(cr[c]) + er[c]) * mw[c];
                        }
                        double dl2 = clamp2(det, er[0] * mw[0] + er[1] * mw[1] + er[2] * mw[2] +
                                                     1e-12 * mdet);
                        if (std::isfinite(dl2) && std::isfinite(a2ub) && dl2 > 0 && a2ub > 0 &&
                            dl2 / a2ub * 0.999 > best_ub)
                            continue;
                    }
                    std::vector<Vec> sub{rest[i], rest[j], rest[k]};
                    if (!affinely_independent(sub)) continue;
                    if (in_affine_hull(sub, ps)) {
                        auto h = hyperplane_through(sub);
                        if (h) bd.av.push_back(make_hyperplane(h->first, h->second));
                        bd.through.push_back(std::move(sub));
                        continue;
                    }
                    consider(dist2_to_flat(sub, ps));
                    best_ub = bd.r2.get_d() * 1.001 + 1e-300;
                }
            }
        }
        // lines never bound the ball: samples carry no side relative to a
        // line, so lines only need exact avoidance, and a line nearly
        // parallel to a spanned plane through ps could otherwise collapse
        // the radius; collect the ones that cross the ball instead
        double bound_ub = bd.r2.get_d() * 1.001 + 1e-300;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (okps && okp[i] && okp[j]) {
                    double u[3], mu[3], w[3], mw[3];
                    for (std::size_t c = 0; c < 3; ++c) {
                        u[c] = xs[j][c] - xs[i][c];
                        mu[c] = axs[j][c] + axs[i][c];
                        w[c] = pd[c] - xs[i][c];
                        mw[c] = apd[c] + axs[i][c];
                    }
                    double cl2 = 0, u2ub = 0;
                    for (std::size_t c = 0; c < 3; ++c) {
                        std::size_t a = (c + 1) % 3, b = (c + 2) % 3;
                        double cr = u[a] * w[b] - u[b] * w[a];
                        double er = 1e-12 * (mu[a] * mw[b] + mu[b] * mw[a]);
                        cl2 += clamp2(cr, er);
                        double uu = std::abs(u[c]) + 1e-12 * mu[c];
                        u2ub += uu * uu;
                    }
                    if (std::isfinite(cl2) && std::isfinite(u2ub) && cl2 > 0 && u2ub > 0 &&
                        cl2 / u2ub * 0.999 > bound_ub)
                        continue;
                }
                Vec dv = rest[j] - rest[i];
                if (dv[0] == 0 && dv[1] == 0 && dv[2] == 0) continue;
                Vec wv = ps - rest[i];
                Vec cx{dv[1] * wv[2] - dv[2] * wv[1], dv[2] * wv[0] - dv[0] * wv[2],
                       dv[0] * wv[1] - dv[1] * wv[0]};
                if (cx[0] == 0 && cx[1] == 0 && cx[2] == 0) {
                    bd.through.push_back({rest[i], rest[j]});
                    continue;
                }
                if (norm2(cx) < bd.r2 * norm2(dv)) bd.near.push_back({rest[i], rest[j]});
            }
        }
    } else {
        for (std::size_t k = 1; k <= d; ++k) {
            combinations(rest.size(), k, [&](const std::vector<std::size_t>& idx) {
                std::vector<Vec> sub;
                for (auto i : idx) sub.push_back(rest[i]);
                if (!affinely_independent(sub)) return;
                if (in_affine_hull(sub, ps)) {
                    if (k == d) {
                        auto h = hyperplane_through(sub);
                        if (h) bd.av.push_back(make_hyperplane(h->first, h->second));
                    }
                    bd.through.push_back(std::move(sub));
                    return;
                }
                consider(dist2_to_flat(sub, ps));
            });
        }
    }
    if (found) bd.r2 /= 4;
    return bd;
}

bool on_any_flat(const std::vector<std::vector<Vec>>& flats, const Vec& x) {
    for (const auto& g : flats)
        if (in_affine_hull(g, x)) return true;
    return false;
}

// Half-width of a safe sampling box inside the flat through ps spanned by
// dirs: every spanned hyperplane of pts missing ps crosses the flat, in
// sampling coordinates, at parameter distance at least twice the returned
// bound, so the whole sampled patch stays in the cell of ps. Crossing
// distances are measured along the flat, so a hyperplane nearly parallel
// to it does not squeeze the patch even when it passes very close to ps.
Scalar flat_cell_half(const std::vector<Vec>& pts, const Vec& ps, const std::vector<Vec>& dirs,
                      std::size_t d) {
    std::size_t n = pts.size(), m = dirs.size();
    bool found = false;
    Scalar best(1);
    auto consider = [&](Scalar v) {
        if (!found || v < best) {
            best = std::move(v);
            found = true;
        }
    };
    // exact offsets from ps keep the double screens free of cancellation
    std::vector<Vec> w;
    w.reserve(n);
    for (const auto& q : pts) w.push_back(q - ps);
    double best_d = 0;
    if (d == 2) {
        const Vec& u = dirs[0];
        std::vector<double> wx(n), wy(n), awx(n), awy(n);
        bool okw = true;
        for (std::size_t i = 0; i < n; ++i) {
            wx[i] = w[i][0].get_d();
            wy[i] = w[i][1].get_d();
            awx[i] = std::abs(wx[i]);
            awy[i] = std::abs(wy[i]);
            okw = okw && std::isfinite(wx[i]) && std::isfinite(wy[i]);
        }
        double ux = u[0].get_d(), uy = u[1].get_d();
        double aux = std::abs(ux), auy = std::abs(uy);
        okw = okw && std::isfinite(ux) && std::isfinite(uy);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (okw && found) {
                    double res = wx[i] * wy[j] - wy[i] * wx[j];
                    double rlb =
                        std::abs(res) - 1e-12 * (awx[i] * awy[j] + awy[i] * awx[j]);
                    double g = (wx[j] - wx[i]) * uy - (wy[j] - wy[i]) * ux;
                    double gub = std::abs(g) +
                                 1e-12 * ((awx[i] + awx[j]) * auy + (awy[i] + awy[j]) * aux);
                    if (std::isfinite(rlb) && std::isfinite(gub) && rlb > 0 && gub > 0 &&
                        rlb / gub * 0.999 > best_d)
                        continue;
                }
                Scalar res = w[i][0] * w[j][1] - w[i][1] * w[j][0];
                if (res == 0) continue;  // hyperplane through ps
                Scalar g = (w[j][0] - w[i][0]) * u[1] - (w[j][1] - w[i][1]) * u[0];
                if (g == 0) continue;  // parallel to the flat: no crossing
                consider(abs(res) / abs(g));
                best_d = best.get_d() * 1.001 + 1e-300;
            }
        }
    } else if (d == 3) {
        std::vector<std::array<double, 3>> wd(n), awd(n);
        bool okw = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 3; ++c) {
                wd[i][c] = w[i][c].get_d();
                awd[i][c] = std::abs(wd[i][c]);
                okw = okw && std::isfinite(wd[i][c]);
            }
        std::vector<std::array<double, 3>> ud(m), aud(m);
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t c = 0; c < 3; ++c) {
                ud[t][c] = dirs[t][c].get_d();
                aud[t][c] = std::abs(ud[t][c]);
                okw = okw && std::isfinite(ud[t][c]);
            }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t k = j + 1; k < n; ++k) {
                    if (okw && found) {
                        double det = 0, mdet = 0, nd[3], nub[3];
                        for (std::size_t c = 0; c < 3; ++c) {
                            std::size_t a = (c + 1) % 3, b = (c + 2) % 3;
                            double cr = wd[j][a] * wd[k][b] - wd[j][b] * wd[k][a];
                            double ecr = awd[j][a] * awd[k][b] + awd[j][b] * awd[k][a];
                            det += wd[i][c] * cr;
                            mdet += awd[i][c] * ecr;
                            nd[c] = (wd[j][a] - wd[i][a]) * (wd[k][b] - wd[i][b]) -
                                    (wd[j][b] - wd[i][b]) * (wd[k][a] - wd[i][a]);
                            nub[c] = std::abs(nd[c]) +
                                     1e-12 * ((awd[j][a] + awd[i][a]) * (awd[k][b] + awd[i][b]) +
                                              (awd[j][b] + awd[i][b]) * (awd[k][a] + awd[i][a]));
                        }
                        double rlb = std::abs(det) - 1e-12 * mdet;
                        double dub = 0;
                        for (std::size_t t = 0; t < m; ++t) {
                            double gt = 0;
                            for (std::size_t c = 0; c < 3; ++c) gt += nub[c] * (aud[t][c] + 1e-300);
                            dub += gt;
                        }
                        if (std::isfinite(rlb) && std::isfinite(dub) && rlb > 0 && dub > 0 &&
                            rlb / dub * 0.999 > best_d)
                            continue;
                    }
                    Vec a = w[j] - w[i], b = w[k] - w[i];
                    Vec nrm{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                            a[0] * b[1] - a[1] * b[0]};
                    if (nrm[0] == 0 && nrm[1] == 0 && nrm[2] == 0) continue;
                    Scalar res = -dot(nrm, w[i]);
                    if (res == 0) continue;  // hyperplane through ps
                    Scalar denom(0);
                    for (const auto& u : dirs) denom += abs(dot(nrm, u));
                    if (denom == 0) continue;  // parallel to the flat
                    consider(abs(res) / denom);
                    best_d = best.get_d() * 1.001 + 1e-300;
                }
            }
        }
    } else {
        combinations(n, d, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vec> sub;
            for (auto i : idx) sub.push_back(pts[i]);
            auto h = hyperplane_through(sub);
            if (!h) return;
            Scalar res = dot(h->first, ps) - h->second;
            if (res == 0) return;
            Scalar denom(0);
            for (const auto& u : dirs) denom += abs(dot(h->first, u));
            if (denom == 0) return;
            consider(abs(res) / denom);
        });
    }
    Scalar cap = rat(1, 16);
    if (!found) return cap;
    Scalar half = best / 2;
    return pow2_below(half < cap ? half : cap);
}

// spanned flats of dimension below d-1 (including the points themselves)
// that pass within the given squared distance of ps without containing it:
// samples near ps must avoid these exactly, since no ball radius protects
// against flats of positive codimension
std::vector<std::vector<Vec>> near_flats_within(const std::vector<Vec>& pts, const Vec& ps,
                                                const Scalar& radius2, std::size_t d) {
    std::vector<std::vector<Vec>> out;
    std::size_t n = pts.size();
    std::vector<Vec> w;
    w.reserve(n);
    for (const auto& q : pts) w.push_back(q - ps);
    for (std::size_t i = 0; i < n; ++i) {
        Scalar n2 = norm2(w[i]);
        if (n2 != 0 && n2 < radius2) out.push_back({pts[i]});
    }
    if (d == 2) return out;
    if (d == 3) {
        std::vector<std::array<double, 3>> wd(n), awd(n);
        bool okw = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 3; ++c) {
                wd[i][c] = w[i][c].get_d();
                awd[i][c] = std::abs(wd[i][c]);
                okw = okw && std::isfinite(wd[i][c]);
            }
        double bound = radius2.get_d() * 1.001 + 1e-300;
        auto clamp2 = [](double v, double e) {
            double t = std::abs(v) - e;
            return t > 0 ? t * t : 0.0;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (okw) {
                    double cl2 = 0, u2ub = 0;
                    for (std::size_t c = 0; c < 3; ++c) {
                        std::size_t a = (c + 1) % 3, b = (c + 2) % 3;
                        double cr = wd[i][a] * wd[j][b] - wd[i][b] * wd[j][a];
                        double er = awd[i][a] * awd[j][b] + awd[i][b] * awd[j][a];
                        cl2 += clamp2(cr, 1e-12 * er);
                        double uu = std::abs(wd[j][c] - wd[i][c]) + 1e-12 * (awd[j][c] + awd[i][c]);
                        u2ub += uu * uu;
                    }
                    if (std::isfinite(cl2) && std::isfinite(u2ub) && cl2 > 0 && u2ub > 0 &&
                        cl2 / u2ub * 0.999 > bound)
                        continue;
                }
                Vec dv = w[j] - w[i];
                if (dv[0] == 0 && dv[1] == 0 && dv[2] == 0) continue;
                Vec cx{w[i][1] * w[j][2] - w[i][2] * w[j][1], w[i][2] * w[j][0] - w[i][0] * w[j][2],
                       w[i][0] * w[j][1] - w[i][1] * w[j][0]};
                if (cx[0] == 0 && cx[1] == 0 && cx[2] == 0) continue;  // through ps
                if (norm2(cx) < radius2 * norm2(dv)) out.push_back({pts[i], pts[j]});
            }
        }
        return out;
    }
    for (std::size_t k = 2; k < d; ++k) {
        combinations(n, k, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vec> sub;
            for (auto i : idx) sub.push_back(pts[i]);
            if (!affinely_independent(sub)) return;
            if (in_affine_hull(sub, ps)) return;
            if (dist2_to_flat(sub, ps) < radius2) out.push_back(std::move(sub));
        });
    }
    return out;
}

// appends the spanned flats that gain the new point q
void add_flats_with(std::vector<std::vector<Vec>>& flats, const std::vector<Vec>& pts,
                    std::size_t d, const Vec& q) {
    flats.push_back({q});
    for (std::size_t k = 2; k <= d; ++k) {
        combinations(pts.size(), k - 1, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vec> sub;
            for (auto i : idx) sub.push_back(pts[i]);
            sub.push_back(q);
            if (affinely_independent(sub)) flats.push_back(std::move(sub));
        });
    }
}

// appends the hyperplanes spanned by q together with d-1 of the given points
void add_hyperplanes_with(std::vector<Hyperplane>& av, const std::vector<Vec>& pts, std::size_t d,
                          const Vec& q) {
    combinations(pts.size(), d - 1, [&](const std::vector<std::size_t>& idx) {
        std::vector<Vec> sub;
        for (auto i : idx) sub.push_back(pts[i]);
        sub.push_back(q);
        auto h = hyperplane_through(sub);
        if (h) av.push_back(make_hyperplane(h->first, h->second));
    });
}

// strict interior test: center inside the simplex spanned by verts
bool strictly_inside(const std::vector<Vec>& verts, const Vec& center) {
    Sign s0 = orientation(verts);
    if (s0 == 0) return false;
    for (std::size_t j = 0; j < verts.size(); ++j) {
        auto t = verts;
        t[j] = center;
        if (orientation(t) != s0) return false;
    }
    return true;
}

// all proper spanned flats of a point list, as independent spanning subsets,
// one per distinct flat
std::vector<std::vector<Vec>> spanned_flats(const std::vector<Vec>& pts, std::size_t d) {
    std::vector<std::vector<Vec>> out;
    std::set<std::vector<std::size_t>> seen;  // closure index sets
    for (std::size_t k = 1; k <= d; ++k) {
        combinations(pts.size(), k, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vec> sub;
            for (auto i : idx) sub.push_back(pts[i]);
            if (!affinely_independent(sub)) return;
            std::vector<std::size_t> cl;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (in_affine_hull(sub, pts[i])) cl.push_back(i);
            if (seen.insert(cl).second) out.push_back(std::move(sub));
        });
    }
    return out;
}

}  // namespace

std::vector<SpannedFlat> minimal_flats(const Configuration& p, const Label& s) {
    if (!p.contains(s)) throw precondition_error("unknown label");
    std::size_t d = p.dim();
    const Vec& ps = p.point(s);
    std::vector<Label> others;
    for (const auto& l : p.labels())
        if (l != s) others.push_back(l);

    std::map<std::set<Label>, SpannedFlat> flats;
    for (std::size_t k = 1; k <= d; ++k) {
        if (k == 2) {
            // a spanned line through ps needs two other points on a common
            // line with ps: group the others by direction from ps
            std::map<Vec, std::vector<std::size_t>> groups;
            std::vector<Label> at_ps;
            for (std::size_t i = 0; i < others.size(); ++i) {
                Vec dir = p.point(others[i]) - ps;
                std::size_t nz = 0;
                while (nz < d && dir[nz] == 0) ++nz;
                if (nz == d) {
                    at_ps.push_back(others[i]);
                    continue;
                }
                Scalar lead = dir[nz];
                for (auto& v : dir) v /= lead;
                groups[std::move(dir)].push_back(i);
            }
            for (const auto& [dir, idx] : groups) {
                if (idx.size() < 2) continue;
                std::set<Label> cl(at_ps.begin(), at_ps.end());
                for (auto i : idx) cl.insert(others[i]);
                if (flats.count(cl)) continue;
                SpannedFlat f;
                f.span = {others[idx[0]], others[idx[1]]};
                f.closure = cl;
                f.flat_dim = 1;
                flats.emplace(std::move(cl), std::move(f));
            }
            continue;
        }
        combinations(others.size(), k, [&](const std::vector<std::size_t>& idx) {
            std::vector<Vec> sub;
            for (auto i : idx) sub.push_back(p.point(others[i]));
            if (!affinely_independent(sub)) return;
            if (!in_affine_hull(sub, ps)) return;
            std::set<Label> cl;
            for (const auto& l : others)
                if (in_affine_hull(sub, p.point(l))) cl.insert(l);
            if (flats.count(cl)) return;
            SpannedFlat f;
            for (auto i : idx) f.span.push_back(others[i]);
            f.closure = cl;
            f.flat_dim = k - 1;
            flats.emplace(std::move(cl), std::move(f));
        });
    }
    std::vector<SpannedFlat> out;
    for (const auto& [cl, f] : flats) {
        bool minimal = true;
        for (const auto& [cl2, f2] : flats)
            if (cl2 != cl && std::includes(cl.begin(), cl.end(), cl2.begin(), cl2.end()))
                minimal = false;
        if (minimal) out.push_back(f);
    }
    return out;
}

Scattering scatter_single_flat(const Configuration& p, const Label& s, std::uint64_t seed) {
    if (!p.full_dimensional()) throw precondition_error("configuration is not full dimensional");
    auto mf = minimal_flats(p, s);
    if (mf.size() > 1) throw precondition_error("point lies on more than one minimal flat");
    std::size_t d = p.dim();
    const Vec ps = p.point(s);

    std::vector<std::pair<Label, Vec>> rest;
    for (const auto& l : p.labels())
        if (l != s) rest.emplace_back(l, p.point(l));
    Configuration cur(d, rest);

    // samples stay inside a ball reaching at most halfway to the nearest
    // spanned flat missing ps, so only hyperplanes through ps (or through a
    // point added here) can ever be hit and need avoiding
    auto bd = ball_data(cur.point_list(), d, ps);
    const Scalar r2 = bd.r2;
    // half the admissible cube so snapped samples stay strictly inside; the
    // snapping keeps cloud coordinates dyadic with a bit length set by the
    // geometry instead of by the exact rational coordinates of ps
    Scalar h = cube_half(r2, d) / 2;
    const Scalar grid = h / (Integer(1) << 30);
    RatRng rng(seed);

    Scattering sc;
    sc.base = p;
    sc.removed = s;
    if (!mf.empty()) sc.z0 = mf[0].span;

    std::vector<Hyperplane> av = std::move(bd.av);
    // low-dimensional flats need exact avoidance: flats through ps (and the
    // occasional line crossing the ball in space) are never excluded by the
    // ball radius alone
    std::vector<std::vector<Vec>> fl = std::move(bd.through);
    for (auto& g : bd.near) fl.push_back(std::move(g));
    std::vector<Vec> engaged = cur.point_list();
    add_hyperplanes_with(av, engaged, d, ps);
    engaged.push_back(ps);

    std::vector<Vec> cloud;
    auto sample = [&]() {
        Vec x = ps;
        for (std::size_t j = 0; j < d; ++j) x[j] = snap_to(x[j] + h * rng.unit(20), grid);
        return x;
    };
    for (std::size_t i = 0; i < d; ++i) {
        bool done = false;
        for (int attempt = 0; attempt < 1024 && !done; ++attempt) {
            Vec x = sample();
            if (on_any(av, x) || on_any_flat(fl, x)) continue;
            add_hyperplanes_with(av, engaged, d, x);
            fl.push_back({x});
            if (d >= 3)
                for (const auto& e : engaged) fl.push_back({e, x});
            engaged.push_back(x);
            cloud.push_back(std::move(x));
            done = true;
        }
        if (!done) throw error("scatter sampling exhausted");
    }
    // final vertex: reflect through the centroid so the simplex encloses ps
    Vec c0(d, Scalar(0));
    for (const auto& v : cloud) c0 = c0 + v;
    c0 = Scalar(1) / Scalar(static_cast<unsigned long>(d)) * c0;
    bool done = false;
    for (int attempt = 0; attempt < 1024 && !done; ++attempt) {
        Scalar jig = h / (Integer(1) << (4 + attempt / 64));
        Vec x = ps + rat(1, 2) * (ps - c0);
        for (std::size_t j = 0; j < d; ++j) x[j] = snap_to(x[j] + jig * rng.unit(16), grid);
        if (norm2(x - ps) >= r2) continue;
        if (on_any(av, x) || on_any_flat(fl, x)) continue;
        auto simplex = cloud;
        simplex.push_back(x);
        if (!strictly_inside(simplex, ps)) continue;
        cloud.push_back(std::move(x));
        done = true;
    }
    if (!done) throw error("scatter simplex sampling exhausted");

    for (std::size_t j = 0; j < cloud.size(); ++j) {
        Label l = fresh_label(p, s + "." + std::to_string(j + 1));
        while (cur.contains(l)) l += "_";
        cur.add_point(l, cloud[j]);
        sc.added.push_back(l);
    }
    sc.result = cur;
    return sc;
}

Scattering scatter_two_flats(const Configuration& p, const Label& s, std::uint64_t seed) {
    if (!p.full_dimensional()) throw precondition_error("configuration is not full dimensional");
    auto mf = minimal_flats(p, s);
    if (mf.size() != 2) throw precondition_error("point must lie on exactly two minimal flats");
    std::size_t d = p.dim();
    const Vec ps = p.point(s);

    auto flat_dirs = [&](const SpannedFlat& f) {
        std::vector<Vec> u;
        const Vec& z0 = p.point(f.span[0]);
        for (std::size_t j = 1; j < f.span.size(); ++j) u.push_back(p.point(f.span[j]) - z0);
        return u;
    };
    auto u1 = flat_dirs(mf[0]), u2 = flat_dirs(mf[1]);
    Mat dm(u1.size() + u2.size(), d);
    for (std::size_t i = 0; i < u1.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) dm(i, j) = u1[i][j];
    for (std::size_t i = 0; i < u2.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) dm(u1.size() + i, j) = u2[i][j];
    if (rank(dm) != u1.size() + u2.size())
        throw precondition_error("the two flats do not meet in a single point");

    RatRng rng(seed);

    std::vector<std::pair<Label, Vec>> rest;
    for (const auto& l : p.labels())
        if (l != s) rest.emplace_back(l, p.point(l));
    Configuration cur(d, rest);

    // flats through ps, for the genericity checks on vertex candidates
    auto bd = ball_data(cur.point_list(), d, ps);
    std::vector<std::vector<Vec>> near_flats = std::move(bd.through);
    std::vector<Vec> engaged = cur.point_list();

    Scattering sc;
    sc.base = p;
    sc.removed = s;
    sc.two_flats = true;
    sc.z1 = mf[0].span;
    sc.z2 = mf[1].span;

    for (int which = 0; which < 2; ++which) {
        const auto& f = mf[which];
        auto dirs = flat_dirs(f);
        std::size_t m = dirs.size();
        std::vector<Vec> fspan;
        for (const auto& l : f.span) fspan.push_back(p.point(l));

        Scalar su(0);
        for (const auto& v : dirs) su += sqrt_upper(norm2(v), 48);

        auto point_at = [&](const Vec& a) {
            Vec x = ps;
            for (std::size_t j = 0; j < m; ++j) x = x + a[j] * dirs[j];
            return x;
        };
        // acceptable vertex: every spanned flat through it contains F_i
        auto generic_in_flat = [&](const Vec& x) {
            for (const auto& g : near_flats) {
                if (!in_affine_hull(g, x)) continue;
                bool contains_f = true;
                for (const auto& z : fspan) contains_f = contains_f && in_affine_hull(g, z);
                if (!contains_f) return false;
            }
            return true;
        };
        auto accept = [&](const Vec& x) {
            add_flats_with(near_flats, engaged, d, x);
            engaged.push_back(x);
        };

        // The sampling patch lives inside the cell of ps sliced along the
        // flat. Crossing distances are measured along the flat, so the
        // vertex scale stays tied to the surrounding structure instead of
        // collapsing with the distance to the nearest nearly parallel
        // hyperplane, which would compound geometrically over a long run of
        // scatterings on a shared line. Recomputed per vertex so hyperplanes
        // through already accepted vertices constrain the later ones.
        auto patch = [&]() {
            Scalar hc = flat_cell_half(engaged, ps, dirs, d);
            Scalar p2 = 4 * hc * hc * su * su;
            return std::make_pair(hc, near_flats_within(engaged, ps, p2, d));
        };

        std::vector<Vec> coeffs;
        auto& slot = which == 0 ? sc.s1 : sc.s2;
        for (std::size_t j = 0; j < m; ++j) {
            auto [hc, pav] = patch();
            const Scalar tg = hc / (Integer(1) << 20);
            bool done = false;
            for (int attempt = 0; attempt < 1024 && !done; ++attempt) {
                Vec a(m, Scalar(0));
                bool small = false;
                for (std::size_t t = 0; t < m; ++t) {
                    a[t] = snap_to(hc * rng.unit(20), tg);
                    small = small || abs(a[t]) * 4 < hc;
                }
                // keep crossings through this vertex well away from ps
                if (small) continue;
                Vec x = point_at(a);
                if (!generic_in_flat(x) || on_any_flat(pav, x)) continue;
                accept(x);
                Label l = fresh_label(p, s + (which == 0 ? ".A" : ".B") + std::to_string(j + 1));
                while (cur.contains(l)) l += "_";
                cur.add_point(l, x);
                slot.push_back(l);
                coeffs.push_back(std::move(a));
                done = true;
            }
            if (!done) throw error("flat simplex sampling exhausted");
        }
        // closing vertex keeps ps strictly in the relative interior: pull
        // back along the mean of the accepted vertices, rescaled into the
        // current patch (any positive pull-back keeps the origin inside)
        Vec ca(m, Scalar(0));
        for (const auto& a : coeffs) ca = ca + a;
        ca = Scalar(1) / Scalar(static_cast<unsigned long>(m)) * ca;
        auto [hc, pav] = patch();
        const Scalar tg = hc / (Integer(1) << 20);
        Scalar camax(0);
        for (const auto& v : ca)
            if (abs(v) > camax) camax = abs(v);
        Scalar lam = rat(1, 2);
        while (camax * lam * 2 > hc) lam /= 2;
        Scalar jig0 = camax == 0 ? Scalar(hc / 8) : Scalar(lam * camax);
        bool done = false;
        for (int attempt = 0; attempt < 1024 && !done; ++attempt) {
            Scalar jig = jig0 / (Integer(1) << (4 + attempt / 64));
            Vec a = (-lam) * ca;
            for (std::size_t t = 0; t < m; ++t) a[t] = snap_to(a[t] + jig * rng.unit(16), tg);
            auto cs = coeffs;
            cs.push_back(a);
            if (!strictly_inside(cs, Vec(m, Scalar(0)))) continue;
            Vec x = point_at(a);
            if (!generic_in_flat(x) || on_any_flat(pav, x)) continue;
            accept(x);
            Label l = fresh_label(p, s + (which == 0 ? ".A" : ".B") + std::to_string(m + 1));
            while (cur.contains(l)) l += "_";
            cur.add_point(l, x);
            slot.push_back(l);
            done = true;
        }
        if (!done) throw error("flat simplex closing vertex exhausted");
    }

    // scatter the simplex vertices one by one to restore genericity
    std::vector<Label> vertices = sc.s1;
    vertices.insert(vertices.end(), sc.s2.begin(), sc.s2.end());
    for (const auto& v : vertices) {
        auto one = scatter_single_flat(cur, v, rng.bits64());
        cur = one.result;
        sc.inner.push_back(std::move(one));
    }
    sc.result = cur;
    for (const auto& l : cur.labels())
        if (!p.contains(l)) sc.added.push_back(l);
    return sc;
}

namespace {

// flats spanned by points of r that do not contain the given flat
std::vector<std::vector<Vec>> avoided_flats(const std::vector<Vec>& pts, std::size_t d,
                                            const std::vector<Vec>& keep) {
    std::vector<std::vector<Vec>> out;
    for (auto& g : spanned_flats(pts, d)) {
        bool contains = true;
        for (const auto& z : keep) contains = contains && in_affine_hull(g, z);
        if (!contains) out.push_back(std::move(g));
    }
    return out;
}

// barycentric coordinates of x in the full-dimensional simplex verts
std::optional<Vec> barycentric(const std::vector<Vec>& verts, const Vec& x, std::size_t d) {
    Mat m(d + 1, verts.size());
    for (std::size_t j = 0; j < verts.size(); ++j) {
        for (std::size_t i = 0; i < d; ++i) m(i, j) = verts[j][i];
        m(d, j) = 1;
    }
    Vec b = x;
    b.push_back(Scalar(1));
    return solve(m, b);
}

}  // namespace

ProjectivePoint recover_point(const Scattering& sc, const Configuration& r) {
    for (const auto& l : sc.result.labels())
        if (!r.contains(l)) throw precondition_error("realization misses label " + l);
    // rebuilt in sc.result's label order so the chirotopes compare directly
    std::vector<std::pair<Label, Vec>> rpts;
    for (const auto& l : sc.result.labels()) rpts.emplace_back(l, r.point(l));
    Configuration rr(sc.result.dim(), rpts);
    if (!same_chirotope(rr, sc.result))
        throw precondition_error("realization has a different chirotope");
    std::size_t d = rr.dim();

    if (sc.two_flats) {
        // recover the simplex vertices innermost-first, then intersect the
        // two recovery flats
        Configuration cur = rr;
        for (auto it = sc.inner.rbegin(); it != sc.inner.rend(); ++it) {
            auto v = recover_point(*it, cur);
            cur.add_point(it->removed, v.affine());
        }
        auto rows_for = [&](const std::vector<Label>& z) {
            std::vector<Vec> zp = cur.point_list(z);
            Mat dirs(zp.size() - 1, d);
            for (std::size_t i = 1; i < zp.size(); ++i)
                for (std::size_t j = 0; j < d; ++j) dirs(i - 1, j) = zp[i][j] - zp[0][j];
            auto ns = nullspace(dirs.rows() ? dirs : Mat(1, d));
            std::vector<std::pair<Vec, Scalar>> rows;
            for (const auto& w : ns) rows.emplace_back(w, dot(w, zp[0]));
            return rows;
        };
        auto r1 = rows_for(sc.z1), r2rows = rows_for(sc.z2);
        Mat m(r1.size() + r2rows.size(), d);
        Vec b;
        std::size_t rI = 0;
        for (const auto& [n, c] : r1) {
            for (std::size_t j = 0; j < d; ++j) m(rI, j) = n[j];
            b.push_back(c);
            ++rI;
        }
        for (const auto& [n, c] : r2rows) {
            for (std::size_t j = 0; j < d; ++j) m(rI, j) = n[j];
            b.push_back(c);
            ++rI;
        }
        if (rank(m) != d) throw error("recovery flats do not meet in a single point");
        auto x = solve(m, b);
        if (!x) throw error("recovery flats do not intersect");
        return ProjectivePoint::from_affine(*x);
    }

    // single flat: a point of aff(R|z0) inside the simplex, off all other flats
    if (sc.z0.size() == 1) return ProjectivePoint::from_affine(rr.point(sc.z0[0]));

    std::vector<Vec> verts = rr.point_list(sc.added);
    std::vector<Vec> zp = rr.point_list(sc.z0);
    std::vector<std::pair<Vec, Scalar>> eqs;  // aff(R|z0) as linear equalities
    std::vector<Vec> dirs;                    // directions inside the flat
    if (!zp.empty()) {
        Mat dm(zp.size() - 1, d);
        for (std::size_t i = 1; i < zp.size(); ++i) {
            dirs.push_back(zp[i] - zp[0]);
            for (std::size_t j = 0; j < d; ++j) dm(i - 1, j) = zp[i][j] - zp[0][j];
        }
        for (const auto& w : nullspace(dm)) eqs.emplace_back(w, dot(w, zp[0]));
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            Vec e(d, Scalar(0));
            e[j] = 1;
            dirs.push_back(e);
        }
    }

    // most-interior point of the simplex slice of the flat
    LinearProgram lp(verts.size() + 1);  // mu_0..mu_d, t
    Vec ones(verts.size() + 1, Scalar(1));
    ones.back() = 0;
    lp.add(ones, LinearProgram::EQ, 1);
    for (const auto& [n, c] : eqs) {
        Vec row(verts.size() + 1, Scalar(0));
        for (std::size_t j = 0; j < verts.size(); ++j) row[j] = dot(n, verts[j]);
        lp.add(std::move(row), LinearProgram::EQ, c);
    }
    for (std::size_t j = 0; j < verts.size(); ++j) {
        Vec row(verts.size() + 1, Scalar(0));
        row[j] = 1;
        row.back() = -1;
        lp.add(std::move(row), LinearProgram::GE, 0);
    }
    lp.objective.back() = 1;
    auto sol = solve_lp(lp);
    if (sol.status != LpSolution::Optimal || sol.value < 0)
        throw error("recovery flat misses the recovery simplex");
    Vec x(d, Scalar(0));
    for (std::size_t j = 0; j < verts.size(); ++j) x = x + sol.x[j] * verts[j];

    // replace the exact optimum by a nearby dyadic point of the flat so the
    // recovered coordinates stay small
    Vec base = zp.empty() ? Vec(d, Scalar(0)) : zp[0];
    Mat dmat(d, dirs.size());
    for (std::size_t j = 0; j < dirs.size(); ++j)
        for (std::size_t i = 0; i < d; ++i) dmat(i, j) = dirs[j][i];
    auto tc = solve(dmat, x - base);
    if (!tc) throw error("recovery point fell off its flat");
    auto dyadic = [](const Scalar& v, unsigned bits) {
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), Integer(v.get_num() << bits).get_mpz_t(),
                   v.get_den().get_mpz_t());
        return Scalar(q) / Scalar(Integer(1) << bits);
    };
    auto pts = rr.point_list();
    auto avoid = avoided_flats(pts, d, zp);

    auto point_at = [&](const Vec& t) {
        Vec y = base;
        for (std::size_t j = 0; j < dirs.size(); ++j) y = y + t[j] * dirs[j];
        return y;
    };
    auto inside_simplex = [&](const Vec& y) {
        auto bc = barycentric(verts, y, d);
        if (!bc) return false;
        for (const auto& l : *bc)
            if (l < 0) return false;
        return true;
    };
    // rounding precision matched to the simplex scale: the recovery simplices
    // shrink geometrically with nesting depth, so the needed precision varies
    unsigned bits = 16;
    for (; bits <= 65536; bits *= 2) {
        Vec t(*tc);
        for (auto& v : t) v = dyadic(v, bits);
        if (inside_simplex(point_at(t))) break;
    }
    RatRng rng(12721);
    for (int attempt = 0; attempt < 4096 && bits <= 65536; ++attempt) {
        Scalar step = Scalar(1) / (Integer(1) << (bits + 2 + attempt / 32));
        Vec t(*tc);
        for (auto& v : t) {
            v = dyadic(v, bits);
            if (attempt > 0) v += step * rng.unit(16);
        }
        Vec y = point_at(t);
        if (!inside_simplex(y)) continue;
        if (on_any_flat(avoid, y)) continue;
        return ProjectivePoint::from_affine(y);
    }
    // fall back to the exact optimum when rounding never lands inside
    if (!on_any_flat(avoid, x)) return ProjectivePoint::from_affine(x);
    throw error("recovery avoidance sampling exhausted");
}

ScatterSequence scatter_all(const Configuration& phat, const std::vector<Label>& protected_labels,
                            std::uint64_t seed) {
    std::set<Label> prot(protected_labels.begin(), protected_labels.end());
    for (const auto& l : prot)
        if (!phat.contains(l)) throw precondition_error("unknown protected label " + l);
    RatRng rng(seed);
    ScatterSequence seq;
    seq.result = phat;
    auto order = phat.labels();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (prot.count(*it)) continue;
        auto mf = minimal_flats(seq.result, *it);
        if (mf.empty()) continue;
        Scattering sc;
        if (mf.size() == 1)
            sc = scatter_single_flat(seq.result, *it, rng.bits64());
        else if (mf.size() == 2)
            sc = scatter_two_flats(seq.result, *it, rng.bits64());
        else
            throw error("point lies on more than two minimal flats");
        seq.result = sc.result;
        seq.steps.push_back(std::move(sc));
    }
    return seq;
}

Configuration scatter_all_undesirable(const Configuration& phat,
                                      const std::vector<Label>& protected_labels,
                                      std::uint64_t seed) {
    return scatter_all(phat, protected_labels, seed).result;
}

}  // namespace chiro
