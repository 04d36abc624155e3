#include "atoms.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>

namespace sepkern {

namespace {

constexpr double kResonanceEps = 1e-12;  // |w_u -+ w_v| below this takes the resonant branch

double ipow(double x, int n) {
    return std::pow(x, static_cast<double>(n));
}

} // namespace

void FunctionAtom::validate() const {
    if (!std::isfinite(scale)) throw ArgumentError("atom scale must be finite");
    switch (kind) {
    case Kind::constant:
        break;
    case Kind::sin:
    case Kind::cos:
        if (!std::isfinite(omega)) throw ArgumentError("trig atom frequency must be finite");
        break;
    case Kind::monomial:
        if (exponent < 0) throw ArgumentError("monomial exponent must be >= 0");
        break;
    case Kind::laurent:
        if (exponent < 1) throw ArgumentError("laurent exponent must be >= 1");
        if (!restriction)
            throw ArgumentError("laurent atom requires a restriction interval excluding 0");
        if (!(restriction->lo > 0.0 || restriction->hi < 0.0))
            throw ArgumentError("laurent restriction must exclude 0");
        break;
    }
}

double FunctionAtom::eval_unrestricted(double t) const {
    switch (kind) {
    case Kind::constant: return scale;
    case Kind::sin:      return scale * std::sin(omega * t);
    case Kind::cos:      return scale * std::cos(omega * t);
    case Kind::monomial: return scale * ipow(t, exponent);
    case Kind::laurent:
        if (t == 0.0) throw DomainError("laurent atom evaluated at 0");
        return scale * ipow(t, -exponent);
    }
    return 0.0;
}

double FunctionAtom::eval(double t) const {
    if (!std::isfinite(t)) throw ArgumentError("atom evaluated at non-finite point");
    if (kind == Kind::laurent && t == 0.0)
        throw DomainError("laurent atom evaluated at 0");
    if (restriction && !restriction->contains(t)) return 0.0;
    return eval_unrestricted(t);
}

double FunctionAtom::sup_bound(const Interval& I) const {
    std::optional<Interval> eff = restriction ? intersect(*restriction, I) : std::optional<Interval>(I);
    if (!eff) return 0.0;
    const double s = std::fabs(scale);
    switch (kind) {
    case Kind::constant:
    case Kind::sin:
    case Kind::cos:
        return s;
    case Kind::monomial:
        return s * std::max(ipow(std::fabs(eff->lo), exponent), ipow(std::fabs(eff->hi), exponent));
    case Kind::laurent: {
        const double closest = std::min(std::fabs(eff->lo), std::fabs(eff->hi));
        if (closest == 0.0) throw DomainError("laurent atom support touches 0");
        return s * ipow(closest, -exponent);
    }
    }
    return s;
}

FunctionAtom make_constant(double scale, std::optional<Interval> r) {
    FunctionAtom a;
    a.kind = FunctionAtom::Kind::constant;
    a.scale = scale;
    a.restriction = r;
    a.validate();
    return a;
}

FunctionAtom make_sin(double omega, double scale, std::optional<Interval> r) {
    FunctionAtom a;
    a.kind = FunctionAtom::Kind::sin;
    a.omega = omega;
    a.scale = scale;
    a.restriction = r;
    a.validate();
    return a;
}

FunctionAtom make_cos(double omega, double scale, std::optional<Interval> r) {
    FunctionAtom a;
    a.kind = FunctionAtom::Kind::cos;
    a.omega = omega;
    a.scale = scale;
    a.restriction = r;
    a.validate();
    return a;
}

FunctionAtom make_monomial(int k, double scale, std::optional<Interval> r) {
    FunctionAtom a;
    a.kind = FunctionAtom::Kind::monomial;
    a.exponent = k;
    a.scale = scale;
    a.restriction = r;
    a.validate();
    return a;
}

FunctionAtom make_laurent(int k, double scale, Interval r) {
    FunctionAtom a;
    a.kind = FunctionAtom::Kind::laurent;
    a.exponent = k;
    a.scale = scale;
    a.restriction = r;
    a.validate();
    return a;
}

const char* kind_name(FunctionAtom::Kind k) {
    switch (k) {
    case FunctionAtom::Kind::constant: return "constant";
    case FunctionAtom::Kind::sin:      return "sin";
    case FunctionAtom::Kind::cos:      return "cos";
    case FunctionAtom::Kind::monomial: return "monomial";
    case FunctionAtom::Kind::laurent:  return "laurent";
    }
    return "?";
}

void PairingConfig::validate() const {
    if (quad_nodes < 2) throw ArgumentError("quad_nodes must be >= 2");
    if (!(quad_tol > 0.0)) throw ArgumentError("quad_tol must be > 0");
    if (max_depth < 0 || max_depth > 24) throw ArgumentError("max_depth out of range");
}

namespace {

PairingConfig& mutable_default_config() {
    static PairingConfig cfg = [] {
        PairingConfig c;
        if (const char* env = std::getenv("SEPKERN_QUAD_NODES")) {
            char* end = nullptr;
            const long n = std::strtol(env, &end, 10);
            if (end && *end == '\0' && n >= 2 && n <= 512)
                c.quad_nodes = static_cast<int>(n);
        }
        return c;
    }();
    return cfg;
}

} // namespace

const PairingConfig& default_pairing_config() { return mutable_default_config(); }

void set_default_quad_nodes(int n) {
    if (n < 2 || n > 512) throw ArgumentError("quad node count out of range [2, 512]");
    mutable_default_config().quad_nodes = n;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 2) throw ArgumentError("gauss_legendre requires n >= 2");
    static std::mutex mtx;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(n);
        if (it != cache.end()) {
            nodes = it->second.first;
            weights = it->second.second;
            return;
        }
    }
    std::vector<double> x(n), w(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev guess, then Newton on P_n
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    {
        std::lock_guard<std::mutex> lock(mtx);
        cache.emplace(n, std::make_pair(x, w));
    }
    nodes = std::move(x);
    weights = std::move(w);
}

double quadrature(const std::function<double(double)>& f, const Interval& G,
                  const PairingConfig& cfg) {
    cfg.validate();
    if (G.degenerate()) return 0.0;
    std::vector<double> x, w;
    gauss_legendre(cfg.quad_nodes, x, w);

    auto estimate = [&](int panels) {
        const double h = G.measure() / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = G.lo + p * h;
            const double mid = a + 0.5 * h;
            double local = 0.0;
            for (size_t i = 0; i < x.size(); ++i)
                local += w[i] * f(mid + 0.5 * h * x[i]);
            sum += 0.5 * h * local;
        }
        return sum;
    };

    double prev = estimate(1);
    for (int depth = 1; depth <= cfg.max_depth; ++depth) {
        const double cur = estimate(1 << depth);
        if (std::fabs(cur - prev) <= cfg.quad_tol * (1.0 + std::fabs(cur)))
            return cur;
        prev = cur;
    }
    std::ostringstream oss;
    oss << "quadrature did not converge on [" << G.lo << ", " << G.hi << "] after "
        << (1 << cfg.max_depth) << " panels (tol " << cfg.quad_tol << ")";
    throw NumericalError(oss.str());
}

namespace {

// integral over [a,b] of cos(k t)
double int_cos(double k, double a, double b) {
    if (std::fabs(k) < kResonanceEps) return b - a;
    return (std::sin(k * b) - std::sin(k * a)) / k;
}

// integral over [a,b] of sin(k t)
double int_sin(double k, double a, double b) {
    if (std::fabs(k) < kResonanceEps) return 0.0;
    return (std::cos(k * a) - std::cos(k * b)) / k;
}

bool in_trig_set(FunctionAtom::Kind k) {
    return k == FunctionAtom::Kind::constant || k == FunctionAtom::Kind::sin ||
           k == FunctionAtom::Kind::cos;
}

bool in_power_set(FunctionAtom::Kind k) {
    return k == FunctionAtom::Kind::constant || k == FunctionAtom::Kind::monomial ||
           k == FunctionAtom::Kind::laurent;
}

// Views constants as cos with omega = 0 so one product-to-sum routine covers all.
struct TrigView {
    bool is_sin;
    double omega;
};

TrigView trig_view(const FunctionAtom& a) {
    if (a.kind == FunctionAtom::Kind::sin) return {true, a.omega};
    if (a.kind == FunctionAtom::Kind::cos) return {false, a.omega};
    return {false, 0.0};
}

double closed_trig(const FunctionAtom& u, const FunctionAtom& v, const Interval& I) {
    const TrigView a = trig_view(u), b = trig_view(v);
    const double lo = I.lo, hi = I.hi;
    const double wp = a.omega + b.omega, wm = a.omega - b.omega;
    double base;
    if (a.is_sin && b.is_sin) {
        base = 0.5 * (int_cos(wm, lo, hi) - int_cos(wp, lo, hi));
    } else if (!a.is_sin && !b.is_sin) {
        base = 0.5 * (int_cos(wm, lo, hi) + int_cos(wp, lo, hi));
    } else {
        // sin(w1 t) cos(w2 t) with (w1, w2) taken in sin-first order
        const double ws = a.is_sin ? a.omega : b.omega;
        const double wc = a.is_sin ? b.omega : a.omega;
        base = 0.5 * (int_sin(ws + wc, lo, hi) + int_sin(ws - wc, lo, hi));
    }
    return u.scale * v.scale * base;
}

int power_of(const FunctionAtom& a) {
    if (a.kind == FunctionAtom::Kind::monomial) return a.exponent;
    if (a.kind == FunctionAtom::Kind::laurent) return -a.exponent;
    return 0;
}

double closed_power(const FunctionAtom& u, const FunctionAtom& v, const Interval& I) {
    const int n = power_of(u) + power_of(v);
    const double lo = I.lo, hi = I.hi;
    if (n < 0 && lo <= 0.0 && hi >= 0.0)
        throw DomainError("negative power integrated across 0");
    double base;
    if (n == -1) {
        base = std::log(hi / lo);
    } else {
        base = (ipow(hi, n + 1) - ipow(lo, n + 1)) / (n + 1);
    }
    return u.scale * v.scale * base;
}

} // namespace

double pair(const FunctionAtom& u, const FunctionAtom& v, const Interval& G,
            const PairingConfig& cfg) {
    u.validate();
    v.validate();
    std::optional<Interval> eff = intersect(std::optional<Interval>(G),
                                            u.restriction ? *u.restriction : G);
    if (eff && v.restriction) eff = intersect(eff, *v.restriction);
    if (!eff || eff->degenerate()) return 0.0;

    if (cfg.method == PairingConfig::Method::closed_form_first) {
        if (in_trig_set(u.kind) && in_trig_set(v.kind)) return closed_trig(u, v, *eff);
        if (in_power_set(u.kind) && in_power_set(v.kind)) return closed_power(u, v, *eff);
    }
    // mixed trig x power products have no closed form here
    return quadrature([&](double t) { return u.eval_unrestricted(t) * v.eval_unrestricted(t); },
                      *eff, cfg);
}

double sigma1(double omega, double a1, double b1) {
    if (omega == 0.0) return 0.0;
    return 0.5 * (b1 - a1) -
           std::cos(omega * (a1 + b1)) * std::sin(omega * (b1 - a1)) / (2.0 * omega);
}

double sigma2(double omega, double a1, double b1) {
    return (b1 - a1) - sigma1(omega, a1, b1);
}

} // namespace sepkern
