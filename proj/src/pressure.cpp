#include "mvflow/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow {

PressureLaw PressureLaw::power_law(double a, double gamma) {
    PressureLaw law;
    law.a = a;
    law.gamma = gamma;
    law.mode = Mode::PowerLaw;
    return law;
}

PressureLaw PressureLaw::tabulated(std::vector<double> s, std::vector<double> p) {
    if (s.size() != p.size() || s.size() < 2)
        throw ConfigError("tabulated pressure law needs >= 2 matching (s, p) samples");
    if (!std::is_sorted(s.begin(), s.end()))
        throw ConfigError("tabulated pressure law: s-samples must be increasing");
    PressureLaw law;
    law.mode = Mode::Tabulated;
    law.tab_s = std::move(s);
    law.tab_p = std::move(p);
    // a, gamma kept as nominal metadata for reports
    return law;
}

bool ValidationReport::all_pass() const {
    for (const auto& c : clauses)
        if (!c.pass) return false;
    return true;
}

namespace {

double tab_interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) {
        // pin p(0) = 0 and interpolate linearly below the first sample
        if (x <= 0.0) return 0.0;
        return ys.front() * (x / xs.front());
    }
    if (x >= xs.back()) {
        // linear continuation with the last segment's slope
        size_t m = xs.size();
        double slope = (ys[m - 1] - ys[m - 2]) / (xs[m - 1] - xs[m - 2]);
        return ys.back() + slope * (x - xs.back());
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(it - xs.begin());
    double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

struct AdaptState {
    const std::function<double(double)>* f;
    double tol;
    int max_depth;
    double err_accum = 0.0;
    bool converged = true;
};

double adapt_rec(AdaptState& st, double a, double fa, double b, double fb, double m,
                 double fm, double whole, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = (*st.f)(lm), frm = (*st.f)(rm);
    double left = simpson(a, fa, flm, m, fm);
    double right = simpson(m, fm, frm, b, fb);
    double delta = left + right - whole;
    if (depth >= st.max_depth) {
        st.converged = false;
        st.err_accum += std::abs(delta);
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * st.tol) {
        st.err_accum += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return adapt_rec(st, a, fa, m, fm, lm, flm, left, depth + 1) +
           adapt_rec(st, m, fm, b, fb, rm, frm, right, depth + 1);
}

} // namespace

namespace quadrature {

Result adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    AdaptState st{&f, tol, max_depth};
    double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    double whole = simpson(a, fa, fm, b, fb);
    res.value = adapt_rec(st, a, fa, b, fb, m, fm, whole, 0);
    res.error_estimate = st.err_accum;
    res.converged = st.converged;
    return res;
}

} // namespace quadrature

double pressure(const PressureLaw& law, double s) {
    if (s < 0.0) throw ConfigError("pressure: density must be >= 0, got " + std::to_string(s));
    if (law.mode == PressureLaw::Mode::Tabulated) return tab_interp(law.tab_s, law.tab_p, s);
    if (s == 0.0) return 0.0;
    return law.a * std::pow(s, law.gamma);
}

double pressure_derivative(const PressureLaw& law, double s) {
    if (s <= 0.0) throw ConfigError("pressure_derivative: density must be > 0");
    if (law.mode == PressureLaw::Mode::Tabulated) {
        double h = 1e-6 * std::max(1.0, s);
        return (tab_interp(law.tab_s, law.tab_p, s + h) -
                tab_interp(law.tab_s, law.tab_p, std::max(s - h, 0.0))) /
               (s + h - std::max(s - h, 0.0));
    }
    return law.a * law.gamma * std::pow(s, law.gamma - 1.0);
}

namespace {

double potential_by_quadrature(const PressureLaw& law, double s) {
    if (s == 0.0) return 0.0;
    auto integrand = [&law](double z) { return pressure(law, z) / (z * z); };
    auto q = quadrature::adaptive_simpson(integrand, 1.0, s, 1e-12);
    if (!q.converged)
        throw RuntimeFailure("pressure_potential quadrature did not converge, residual " +
                             std::to_string(q.error_estimate));
    return s * q.value;
}

} // namespace

double pressure_potential(const PressureLaw& law, double s) {
    if (s < 0.0) throw ConfigError("pressure_potential: density must be >= 0");
    if (law.mode == PressureLaw::Mode::Tabulated) return potential_by_quadrature(law, s);
    if (s == 0.0) return 0.0;
    if (law.gamma == 1.0) return law.a * s * std::log(s);
    return law.a * (std::pow(s, law.gamma) - s) / (law.gamma - 1.0);
}

double pressure_potential_derivative(const PressureLaw& law, double s) {
    if (s <= 0.0) throw ConfigError("pressure_potential_derivative: density must be > 0");
    if (law.mode == PressureLaw::Mode::Tabulated) {
        // P(s) = s q(s) with q' = p/s^2, so P'(s) = P(s)/s + p(s)/s
        return pressure_potential(law, s) / s + pressure(law, s) / s;
    }
    if (law.gamma == 1.0) return law.a * (std::log(s) + 1.0);
    return law.a * (law.gamma * std::pow(s, law.gamma - 1.0) - 1.0) / (law.gamma - 1.0);
}

double helmholtz_distance(const PressureLaw& law, double s, double r) {
    if (s < 0.0) throw ConfigError("helmholtz_distance: s must be >= 0");
    if (r <= 0.0) throw ConfigError("helmholtz_distance: reference density must be > 0");
    return pressure_potential(law, s) - pressure_potential_derivative(law, r) * (s - r) -
           pressure_potential(law, r);
}

namespace {

std::vector<double> log_sample_grid() {
    // log-spaced densities from 1e-4 to 1e6, 81 points
    std::vector<double> s;
    for (int i = 0; i <= 80; ++i) s.push_back(std::pow(10.0, -4.0 + 10.0 * i / 80.0));
    return s;
}

void require_finite(double v, double s, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "validate_law: non-finite " << what << " at s = " << s;
        throw RuntimeFailure(os.str());
    }
}

} // namespace

ValidationReport validate_law(const PressureLaw& law) {
    ValidationReport rep;
    rep.sample_points = log_sample_grid();

    // parameter signs (power-law mode carries them; tabulated checks shape only)
    if (law.mode == PressureLaw::Mode::PowerLaw) {
        rep.clauses.push_back({"a > 0", law.a > 0.0, "a = " + std::to_string(law.a)});
        rep.clauses.push_back(
            {"gamma >= 1", law.gamma >= 1.0, "gamma = " + std::to_string(law.gamma)});
        if (law.a <= 0.0 || law.gamma < 1.0) return rep;  // remaining clauses meaningless
    }

    double p0 = pressure(law, 0.0);
    require_finite(p0, 0.0, "p");
    rep.clauses.push_back({"p(0) = 0", std::abs(p0) <= 1e-14, "p(0) = " + std::to_string(p0)});

    bool monotone = true;
    double bad_s = 0.0;
    for (double s : rep.sample_points) {
        double dp = pressure_derivative(law, s);
        require_finite(dp, s, "p'");
        if (dp <= 0.0) {
            monotone = false;
            bad_s = s;
            break;
        }
    }
    rep.clauses.push_back({"p'(s) > 0 for s > 0", monotone,
                           monotone ? "on 81 log-spaced samples"
                                    : "violated at s = " + std::to_string(bad_s)});

    // liminf p'(s) > 0: ratio lower bound at the largest samples
    double dp3 = pressure_derivative(law, 1e3);
    double dp6 = pressure_derivative(law, 1e6);
    require_finite(dp3, 1e3, "p'");
    require_finite(dp6, 1e6, "p'");
    bool liminf_dp = dp3 > 1e-12 && dp6 > 1e-12;
    rep.clauses.push_back({"liminf p' > 0 (finite surrogate)", liminf_dp,
                           "p'(1e3) = " + std::to_string(dp3) +
                               ", p'(1e6) = " + std::to_string(dp6)});

    // liminf P/p > 0: same surrogate
    double r3 = pressure_potential(law, 1e3) / pressure(law, 1e3);
    double r6 = pressure_potential(law, 1e6) / pressure(law, 1e6);
    require_finite(r3, 1e3, "P/p");
    require_finite(r6, 1e6, "P/p");
    bool liminf_ratio = r3 > 1e-12 && r6 >= r3 * 0.5;
    rep.clauses.push_back({"liminf P/p > 0 (finite surrogate)", liminf_ratio,
                           "P/p(1e3) = " + std::to_string(r3) +
                               ", P/p(1e6) = " + std::to_string(r6)});

    // consistency P''(s) = p'(s)/s by central differences of P
    double worst = 0.0;
    for (double s : rep.sample_points) {
        if (s < 1e-3 || s > 1e5) continue;
        double h = 1e-3 * s;  // balances truncation vs cancellation for the P ~ s^g scale
        double ddP = (pressure_potential(law, s + h) - 2.0 * pressure_potential(law, s) +
                      pressure_potential(law, s - h)) /
                     (h * h);
        double ref = pressure_derivative(law, s) / s;
        require_finite(ddP, s, "P''");
        double rel = std::abs(ddP - ref) / std::max(std::abs(ref), 1e-30);
        worst = std::max(worst, rel);
    }
    // central differences of the closed form carry ~1e-6 h^2 s^2 / (h^2) rounding;
    // 1e-4 relative comfortably separates a wrong potential from roundoff
    rep.clauses.push_back({"P'' = p'/s (finite differences)", worst < 1e-4,
                           "max relative deviation " + std::to_string(worst)});
    return rep;
}

double fit_growth_constant(const PressureLaw& law) {
    double c = 0.0;
    for (int i = 0; i <= 60; ++i) {
        double s = 2.0 * std::pow(10.0, 5.7 * i / 60.0);
        double P = pressure_potential(law, s);
        if (P <= 0.0) return std::numeric_limits<double>::infinity();
        c = std::max(c, pressure(law, s) / P);
    }
    return c;
}

} // namespace mvflow
