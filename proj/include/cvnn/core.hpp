#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cvnn/error.hpp"

namespace cvnn {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline double norm2(const CVec& z) {
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v);
    return std::sqrt(s);
}

/// Closed subsets of the complex plane built from lines, rays and finite point lists.
class SetDescription {
public:
    struct Line { cplx origin; cplx direction; };
    struct Ray { cplx origin; cplx direction; };
    struct Points { CVec points; };
    using Piece = std::variant<Line, Ray, Points>;

    SetDescription() = default;

    static SetDescription none() { return {}; }
    static SetDescription line(cplx origin, cplx direction) {
        SetDescription s;
        s.pieces_.push_back(Line{origin, direction / std::abs(direction)});
        return s;
    }
    static SetDescription real_axis() { return line(0.0, 1.0); }
    static SetDescription imag_axis() { return line(0.0, I); }
    static SetDescription ray(cplx origin, cplx direction) {
        SetDescription s;
        s.pieces_.push_back(Ray{origin, direction / std::abs(direction)});
        return s;
    }
    static SetDescription points(CVec pts) {
        SetDescription s;
        if (!pts.empty()) s.pieces_.push_back(Points{std::move(pts)});
        return s;
    }

    SetDescription operator|(const SetDescription& other) const {
        SetDescription s = *this;
        s.pieces_.insert(s.pieces_.end(), other.pieces_.begin(), other.pieces_.end());
        return s;
    }

    bool empty() const { return pieces_.empty(); }
    const std::vector<Piece>& pieces() const { return pieces_; }

    double distance(cplx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : pieces_) d = std::min(d, piece_distance(p, z));
        return d;
    }

    bool contains(cplx z, double tol = 0.0) const { return distance(z) <= tol; }

    std::string describe() const {
        if (pieces_.empty()) return "none";
        std::ostringstream os;
        bool first = true;
        for (const auto& p : pieces_) {
            if (!first) os << " | ";
            first = false;
            if (auto* l = std::get_if<Line>(&p)) {
                if (l->origin == cplx{} && l->direction == cplx{1, 0}) os << "real-axis";
                else if (l->origin == cplx{} && l->direction == I) os << "imag-axis";
                else os << "line(" << fmt(l->origin) << "," << fmt(l->direction) << ")";
            } else if (auto* r = std::get_if<Ray>(&p)) {
                os << "ray(" << fmt(r->origin) << "," << fmt(r->direction) << ")";
            } else {
                const auto& pts = std::get<Points>(p).points;
                os << "points{";
                for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? "," : "") << fmt(pts[i]);
                os << "}";
            }
        }
        return os.str();
    }

    /// Points at distance `offset` from the set on both sides, inside the disc B_radius(center).
    CVec probes(cplx center, double radius, double offset, int per_piece) const {
        CVec out;
        auto keep = [&](cplx z) {
            if (std::abs(z - center) <= radius && distance(z) >= 0.5 * offset) out.push_back(z);
        };
        for (const auto& p : pieces_) {
            if (auto* pt = std::get_if<Points>(&p)) {
                for (cplx q : pt->points)
                    for (int k = 0; k < 4; ++k)
                        keep(q + offset * std::polar(1.0, pi / 4 + k * pi / 2));
                continue;
            }
            cplx o, d;
            double tmin;
            if (auto* l = std::get_if<Line>(&p)) { o = l->origin; d = l->direction; tmin = -1e300; }
            else { auto& r = std::get<Ray>(p); o = r.origin; d = r.direction; tmin = 0.0; }
            // |o + t d - c|^2 = t^2 + 2 t Re((o-c) conj d) + |o-c|^2 <= radius^2
            cplx oc = o - center;
            double bq = std::real(oc * std::conj(d));
            double disc = bq * bq - (std::norm(oc) - radius * radius);
            if (disc <= 0) continue;
            double t0 = std::max(tmin, -bq - std::sqrt(disc));
            double t1 = -bq + std::sqrt(disc);
            if (t1 <= t0) continue;
            cplx normal = I * d;
            for (int k = 0; k < per_piece; ++k) {
                double t = t0 + (t1 - t0) * (k + 0.5) / per_piece;
                keep(o + t * d + offset * normal);
                keep(o + t * d - offset * normal);
            }
        }
        return out;
    }

private:
    static std::string fmt(cplx z) {
        std::ostringstream os;
        os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
        return os.str();
    }

    static double piece_distance(const Piece& p, cplx z) {
        if (auto* l = std::get_if<Line>(&p))
            return std::abs(std::imag((z - l->origin) * std::conj(l->direction)));
        if (auto* r = std::get_if<Ray>(&p)) {
            cplx rel = (z - r->origin) * std::conj(r->direction);
            return rel.real() < 0 ? std::abs(rel) : std::abs(rel.imag());
        }
        double d = std::numeric_limits<double>::infinity();
        for (cplx q : std::get<Points>(p).points) d = std::min(d, std::abs(z - q));
        return d;
    }

    std::vector<Piece> pieces_;
};

/// Finite sample of a ball in C^d.
struct Grid {
    CVec center;
    double radius = 0.0;
    int points_per_axis = 0;
    std::uint64_t seed = 0;
    std::vector<CVec> points;

    std::size_t dim() const { return center.size(); }
    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// Flattened first coordinates, convenient when d = 1.
    CVec scalars() const {
        CVec out;
        out.reserve(points.size());
        for (const auto& p : points) out.push_back(p.front());
        return out;
    }

    static Grid from_scalars(const CVec& pts, cplx center, double radius) {
        Grid g;
        g.center = {center};
        g.radius = radius;
        g.points.reserve(pts.size());
        for (cplx z : pts) g.points.push_back({z});
        return g;
    }
};

/// Regular tensor grid of the ball B_radius(center) in C^d = R^{2d}.
/// Points whose coordinates lie within radius/(10*points_per_axis) of `avoid` are dropped.
inline Grid make_grid(const CVec& center, double radius, int points_per_axis,
                      const SetDescription& avoid = {}) {
    if (center.empty()) throw std::invalid_argument("make_grid: dimension must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("make_grid: radius must be positive");
    if (points_per_axis < 2) throw std::invalid_argument("make_grid: need at least 2 points per axis");
    const std::size_t d = center.size();
    const std::size_t axes = 2 * d;
    const double guard = radius / (10.0 * points_per_axis);
    std::vector<double> ticks(points_per_axis);
    for (int k = 0; k < points_per_axis; ++k)
        ticks[k] = -radius + 2.0 * radius * k / (points_per_axis - 1);

    Grid g;
    g.center = center;
    g.radius = radius;
    g.points_per_axis = points_per_axis;
    std::vector<int> idx(axes, 0);
    const double r2 = radius * radius * (1.0 + 1e-12);
    while (true) {
        double s = 0.0;
        for (std::size_t a = 0; a < axes; ++a) s += ticks[idx[a]] * ticks[idx[a]];
        if (s <= r2) {
            CVec p(d);
            bool ok = true;
            for (std::size_t c = 0; c < d && ok; ++c) {
                p[c] = center[c] + cplx{ticks[idx[2 * c]], ticks[idx[2 * c + 1]]};
                if (!avoid.empty() && avoid.distance(p[c]) < guard) ok = false;
            }
            if (ok) g.points.push_back(std::move(p));
        }
        std::size_t a = 0;
        while (a < axes && ++idx[a] == points_per_axis) idx[a++] = 0;
        if (a == axes) break;
    }
    if (g.points.empty()) throw GridExhausted();
    return g;
}

inline Grid make_grid(cplx center, double radius, int points_per_axis,
                      const SetDescription& avoid = {}) {
    return make_grid(CVec{center}, radius, points_per_axis, avoid);
}

/// Uniform random point in the disc of the given radius.
template <class Rng>
cplx uniform_disc(Rng& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = radius * std::sqrt(u(rng));
    double t = 2.0 * pi * u(rng);
    return std::polar(r, t);
}

/// Uniform random point in the ball of C^d (as R^{2d}).
template <class Rng>
CVec uniform_ball(Rng& rng, const CVec& center, double radius) {
    const std::size_t d = center.size();
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(2 * d);
    double s = 0.0;
    for (auto& x : v) { x = n(rng); s += x * x; }
    double r = radius * std::pow(u(rng), 1.0 / (2.0 * d)) / std::sqrt(s);
    CVec p(d);
    for (std::size_t c = 0; c < d; ++c) p[c] = center[c] + r * cplx{v[2 * c], v[2 * c + 1]};
    return p;
}

/// Seeded random sample of a ball, rejecting points near `avoid`.
inline Grid random_grid(const CVec& center, double radius, std::size_t count, std::uint64_t seed,
                        const SetDescription& avoid = {}, double guard = 0.0) {
    if (!(radius > 0.0)) throw std::invalid_argument("random_grid: radius must be positive");
    std::mt19937_64 rng(seed);
    Grid g;
    g.center = center;
    g.radius = radius;
    g.seed = seed;
    std::size_t tries = 0;
    while (g.points.size() < count) {
        if (++tries > 100 * count + 1000) throw GridExhausted();
        CVec p = uniform_ball(rng, center, radius);
        bool ok = true;
        for (cplx c : p)
            if (!avoid.empty() && avoid.distance(c) < guard) ok = false;
        if (ok) g.points.push_back(std::move(p));
    }
    return g;
}

}  // namespace cvnn
