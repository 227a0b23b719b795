#include "latshell/counting.hpp"

#include "latshell/errors.hpp"
#include "latshell/parallel.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace latshell {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_shell(const ShellQuery& q) {
    if (q.R < 0) throw std::invalid_argument("shell query requires R >= 0");
    if (q.delta < 0) throw std::invalid_argument("shell query requires delta >= 0");
}

// Per-coordinate half-sides of a box guaranteed to contain {gauge <= T}.
// Extents are floating; a relative pad plus +1 makes the cover safe, and the
// exact predicate rejects anything extraneous.
std::vector<std::int64_t> enclosing_box(const ConvexBody& body, const Rational& T) {
    const double t = std::max(T.get_d(), 0.0);
    std::vector<std::int64_t> box;
    box.reserve(static_cast<std::size_t>(body.dimension()));
    for (double e : body.coordinate_extents()) {
        const double b = t * e * (1.0 + 1e-9) + 1.0;
        if (b > 9.0e18) throw TooLargeError("shell box side exceeds int64 range");
        box.push_back(static_cast<std::int64_t>(b));
    }
    return box;
}

std::uint64_t checked_box_volume(const std::vector<std::int64_t>& half_sides,
                                 std::uint64_t guard, bool squared, bool override_guard,
                                 const char* suggestion) {
    long double vol = 1.0L;
    for (std::int64_t b : half_sides) vol *= static_cast<long double>(2 * b + 1);
    if (squared) vol *= vol;
    if (!override_guard && vol > static_cast<long double>(guard))
        throw TooLargeError(std::string("brute-force size exceeds the feasibility guard; ") +
                            suggestion);
    return vol > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(vol);
}

// Odometer over coordinates [from, to) of a symmetric box, each running from
// -half[i] to +half[i]. Returns false once exhausted.
bool advance(IntVec& k, const std::vector<std::int64_t>& half, std::size_t from, std::size_t to) {
    for (std::size_t i = to; i-- > from;) {
        if (k[i] < half[i]) {
            ++k[i];
            for (std::size_t j = i + 1; j < to; ++j) k[j] = -half[j];
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Fiber machinery: along the last coordinate, the form G(k_d) is a convex
// integer-valued function, so each sublevel set {k_d : G(k_d) <= X} (or < X)
// is an integer interval. Endpoints are located by monotone galloping +
// bisection with every comparison made exactly.
// ---------------------------------------------------------------------------

struct FiberContext {
    const ConvexBody* body;
    bool use_i128;
    std::uint64_t probes = 0;

    int cmp(const PreparedRational& bound, IntVec& k) {
        ++probes;
        if (use_i128) return bound.cmp(body->form_i128(k));
        return bound.cmp(body->form(k));
    }
};

struct FiberCondition {
    const PreparedRational* bound;
    bool strict; // true: form < bound, false: form <= bound

    bool ok(int cmp_result) const { return strict ? cmp_result < 0 : cmp_result <= 0; }
};

// Integer minimizer of the form along the fiber. The ball and pball forms are
// separable with minimum at 0; the ellipsoid minimizer gets a floating seed
// followed by an exact local descent (the form is convex, so the descent is
// correct regardless of seed error).
std::int64_t fiber_minimizer(const ConvexBody& body, IntVec& k, FiberContext& ctx) {
    if (body.kind() != BodyKind::ellipsoid) return 0;
    const auto& A = body.matrix();
    const int d = body.dimension();
    double num = 0;
    for (int i = 0; i + 1 < d; ++i)
        num += static_cast<double>(A[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(i)]) *
               static_cast<double>(k[static_cast<std::size_t>(i)]);
    const double seed =
        -num / static_cast<double>(A[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(d - 1)]);
    const std::size_t last = k.size() - 1;
    std::int64_t n = static_cast<std::int64_t>(std::llround(seed));

    if (ctx.use_i128) {
        auto form_at = [&](std::int64_t v) {
            k[last] = v;
            ++ctx.probes;
            return ctx.body->form_i128(k);
        };
        __int128 here = form_at(n);
        for (;;) {
            const __int128 left = form_at(n - 1);
            if (left < here) { --n; here = left; continue; }
            const __int128 right = form_at(n + 1);
            if (right < here) { ++n; here = right; continue; }
            return n;
        }
    }
    auto form_at = [&](std::int64_t v) {
        k[last] = v;
        ++ctx.probes;
        return ctx.body->form(k);
    };
    BigInt here = form_at(n);
    for (;;) {
        BigInt left = form_at(n - 1);
        if (left < here) { --n; here = std::move(left); continue; }
        BigInt right = form_at(n + 1);
        if (right < here) { ++n; here = std::move(right); continue; }
        return n;
    }
}

// Number of integers k_d in [-cap, cap] satisfying the condition, given the
// convex form along the fiber and its integer minimizer.
std::int64_t fiber_interval_count(FiberContext& ctx, IntVec& k, std::int64_t minimizer,
                                  std::int64_t cap, const FiberCondition& cond) {
    const std::size_t last = k.size() - 1;
    auto ok_at = [&](std::int64_t v) {
        k[last] = v;
        return cond.ok(ctx.cmp(*cond.bound, k));
    };
    if (!ok_at(minimizer)) return 0;

    // Farthest satisfying point toward dir within [-cap, cap]: gallop, bisect.
    auto edge = [&](int dir) {
        std::int64_t lo = minimizer; // known ok
        __int128 step = 1;
        std::int64_t bad;
        for (;;) {
            const __int128 wide = static_cast<__int128>(minimizer) + static_cast<__int128>(dir) * step;
            std::int64_t probe;
            bool clamped = false;
            if (dir > 0 ? wide > cap : wide < -cap) {
                probe = dir > 0 ? cap : -cap;
                clamped = true;
            } else {
                probe = static_cast<std::int64_t>(wide);
            }
            if (ok_at(probe)) {
                if (clamped) return probe; // the whole stretch to the cap is inside
                lo = probe;
                step *= 2;
                continue;
            }
            bad = probe;
            break;
        }
        // invariant: ok(lo), !ok(bad)
        while ((dir > 0 ? bad - lo : lo - bad) > 1) {
            const std::int64_t mid = lo + (bad - lo) / 2;
            if (ok_at(mid))
                lo = mid;
            else
                bad = mid;
        }
        return lo;
    };

    const std::int64_t hi = edge(+1);
    const std::int64_t lo = edge(-1);
    return hi - lo + 1;
}

struct PreparedShell {
    PreparedRational hi_pow;     // (R+delta)^deg
    PreparedRational lo_pow;     // R^deg
    bool lo_strict;              // closed: count {form < lo}; half_open: {form <= lo}
};

PreparedShell prepare_shell(const ShellQuery& query) {
    const unsigned long deg = static_cast<unsigned long>(query.body.degree());
    auto powq = [deg](const Rational& r) {
        BigInt n, d;
        mpz_pow_ui(n.get_mpz_t(), r.get_num().get_mpz_t(), deg);
        mpz_pow_ui(d.get_mpz_t(), r.get_den().get_mpz_t(), deg);
        Rational out(n, d);
        out.canonicalize();
        return out;
    };
    // closed shell = {form <= hi} minus {form < lo}
    // half-open    = {form <= hi} minus {form <= lo}
    return PreparedShell{PreparedRational(powq(query.R + query.delta)),
                         PreparedRational(powq(query.R)),
                         query.convention == Convention::closed};
}

} // namespace

std::string count_method_name(CountMethod m) {
    switch (m) {
    case CountMethod::brute: return "brute";
    case CountMethod::fiber: return "fiber";
    case CountMethod::diff_weight: return "diff_weight";
    case CountMethod::closed_form: return "closed_form";
    }
    return "unknown";
}

ResolvedBoxes resolve_pair_boxes(const PhaseFunction& phi, const Rational& q, const Rational& C) {
    if (q <= 0) throw std::invalid_argument("pair query requires q > 0");
    if (C < 0) throw std::invalid_argument("pair query requires C >= 0");
    ResolvedBoxes out;
    out.half_side.reserve(phi.alpha().size());
    for (const Rational& a : phi.alpha()) {
        if (auto exact = exact_rational_power(q, a)) {
            out.half_side.push_back(floor_rational_i64(C * *exact));
        } else {
            out.exact = false;
            const double side = C.get_d() * rational_power_double(q, a);
            if (side > 9.0e18) throw TooLargeError("pair box side exceeds int64 range");
            out.half_side.push_back(static_cast<std::int64_t>(std::floor(side)));
        }
    }
    if (auto exact = exact_rational_power(q, phi.beta())) {
        out.level = *exact;
    } else {
        out.exact = false;
        // Nearest dyadic rational to the floating value: deterministic, flagged.
        out.level = Rational(rational_power_double(q, phi.beta()));
        out.level.canonicalize();
    }
    return out;
}

CountResult shell_count_brute(const ShellQuery& query, const CountOptions& opts) {
    validate_shell(query);
    const auto start = Clock::now();
    const auto box = enclosing_box(query.body, query.R + query.delta);
    const std::uint64_t volume = checked_box_volume(box, opts.brute_guard, false,
                                                    opts.override_guard,
                                                    "use shell_count_fiber instead");
    const int d = query.body.dimension();
    const RationalWindow window =
        gauge_form_window(query.body, query.R, query.R + query.delta,
                          query.convention == Convention::half_open);
    std::int64_t max_coord = 0;
    for (std::int64_t b : box) max_coord = std::max(max_coord, b);
    const bool use_i128 = max_coord <= query.body.form_i128_coord_limit();

    const std::int64_t n_chunks = 2 * box[0] + 1;
    std::vector<BigInt> subtotals(static_cast<std::size_t>(n_chunks));
    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        IntVec k(static_cast<std::size_t>(d));
        k[0] = -box[0] + chunk;
        for (std::size_t j = 1; j < k.size(); ++j) k[j] = -box[j];
        BigInt local(0);
        do {
            const bool in = use_i128 ? window.contains(query.body.form_i128(k))
                                     : window.contains(query.body.form(k));
            if (in) ++local;
        } while (advance(k, box, 1, k.size()));
        subtotals[static_cast<std::size_t>(chunk)] = std::move(local);
    });

    CountResult result;
    result.method = CountMethod::brute;
    for (const BigInt& s : subtotals) result.count += s;
    result.points_examined = volume;
    result.wall_time = seconds_since(start);
    return result;
}

CountResult shell_count_fiber(const ShellQuery& query, const CountOptions& opts) {
    validate_shell(query);
    const auto start = Clock::now();
    const auto box = enclosing_box(query.body, query.R + query.delta);
    const int d = query.body.dimension();
    const PreparedShell shell = prepare_shell(query);
    std::int64_t max_coord = 0;
    for (std::int64_t b : box) max_coord = std::max(max_coord, b);
    const bool use_i128 = max_coord + 2 <= query.body.form_i128_coord_limit();

    const FiberCondition upper{&shell.hi_pow, false};
    const FiberCondition lower{&shell.lo_pow, shell.lo_strict};

    const std::int64_t n_chunks = 2 * box[0] + 1;
    std::vector<BigInt> subtotals(static_cast<std::size_t>(n_chunks));
    std::vector<std::uint64_t> probe_counts(static_cast<std::size_t>(n_chunks), 0);

    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        FiberContext ctx{&query.body, use_i128};
        IntVec k(static_cast<std::size_t>(d));
        k[0] = -box[0] + chunk;
        for (std::size_t j = 1; j < k.size(); ++j) k[j] = -box[j];
        BigInt local(0);
        const std::size_t prefix_len = k.size() - 1;
        const std::int64_t cap = box.back();
        do {
            const std::int64_t minim = fiber_minimizer(query.body, k, ctx);
            const std::int64_t n_hi = fiber_interval_count(ctx, k, minim, cap, upper);
            if (n_hi > 0) {
                const std::int64_t n_lo = fiber_interval_count(ctx, k, minim, cap, lower);
                local += n_hi - n_lo;
            }
        } while (advance(k, box, 1, prefix_len));
        subtotals[static_cast<std::size_t>(chunk)] = std::move(local);
        probe_counts[static_cast<std::size_t>(chunk)] = ctx.probes;
    });

    CountResult result;
    result.method = CountMethod::fiber;
    for (const BigInt& s : subtotals) result.count += s;
    for (std::uint64_t p : probe_counts) result.points_examined += p;
    result.wall_time = seconds_since(start);
    return result;
}

CountResult ball_count(const ConvexBody& body, const Rational& R, const CountOptions& opts) {
    if (R < 0) throw std::invalid_argument("ball count requires R >= 0");
    ShellQuery query{body, Rational(0), R, Convention::closed};
    CountResult result = shell_count_fiber(query, opts);
    return result;
}

double discrepancy(const ConvexBody& body, const Rational& R, const CountOptions& opts) {
    const CountResult n = ball_count(body, R, opts);
    const double rd = std::pow(R.get_d(), body.dimension());
    return n.count.get_d() - body.volume() * rd;
}

CountResult pair_count_brute(const PairQuery& query, const CountOptions& opts) {
    if (query.delta < 0) throw std::invalid_argument("pair query requires delta >= 0");
    const auto start = Clock::now();
    const ResolvedBoxes boxes = resolve_pair_boxes(query.phi, query.q, query.C);
    const std::uint64_t volume = checked_box_volume(boxes.half_side, opts.brute_guard, true,
                                                    opts.override_guard,
                                                    "use pair_count_diff_weight instead");
    const int d = query.phi.dimension();
    const PhaseLevelWindow window =
        query.phi.level_window(boxes.level, query.delta, query.convention);

    const std::int64_t n_chunks = 2 * boxes.half_side[0] + 1;
    std::vector<BigInt> subtotals(static_cast<std::size_t>(n_chunks));
    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        const auto& half = boxes.half_side;
        IntVec n(static_cast<std::size_t>(d)), m(static_cast<std::size_t>(d)),
            diff(static_cast<std::size_t>(d));
        n[0] = -half[0] + chunk;
        for (std::size_t j = 1; j < n.size(); ++j) n[j] = -half[j];
        BigInt local(0);
        do {
            for (std::size_t j = 0; j < m.size(); ++j) m[j] = -half[j];
            do {
                for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = n[j] - m[j];
                if (window.contains(diff)) ++local;
            } while (advance(m, half, 0, m.size()));
        } while (advance(n, half, 1, n.size()));
        subtotals[static_cast<std::size_t>(chunk)] = std::move(local);
    });

    CountResult result;
    result.method = CountMethod::brute;
    result.exact_scales = boxes.exact;
    for (const BigInt& s : subtotals) result.count += s;
    result.points_examined = volume;
    result.wall_time = seconds_since(start);
    return result;
}

CountResult pair_count_diff_weight(const PairQuery& query, const CountOptions& opts) {
    if (query.delta < 0) throw std::invalid_argument("pair query requires delta >= 0");
    if (!query.phi.translation_invariant())
        throw UnsupportedPhaseError("diff_weight counter requires phi(x,y) = phi0(x-y)");
    const auto start = Clock::now();
    const ResolvedBoxes boxes = resolve_pair_boxes(query.phi, query.q, query.C);
    const int d = query.phi.dimension();
    const PhaseLevelWindow window =
        query.phi.level_window(boxes.level, query.delta, query.convention);

    // Differences range over |k_j| <= L_j - 1 with weight prod (L_j - |k_j|).
    std::vector<std::int64_t> diff_half(boxes.half_side.size());
    std::vector<std::int64_t> sides(boxes.half_side.size());
    for (std::size_t j = 0; j < boxes.half_side.size(); ++j) {
        sides[j] = 2 * boxes.half_side[j] + 1;
        diff_half[j] = sides[j] - 1;
    }

    const std::int64_t n_chunks = 2 * diff_half[0] + 1;
    std::vector<BigInt> subtotals(static_cast<std::size_t>(n_chunks));
    std::vector<std::uint64_t> examined(static_cast<std::size_t>(n_chunks), 0);
    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        IntVec k(static_cast<std::size_t>(d));
        k[0] = -diff_half[0] + chunk;
        for (std::size_t j = 1; j < k.size(); ++j) k[j] = -diff_half[j];
        BigInt local(0);
        std::uint64_t seen = 0;
        const BigInt w0(sides[0] - std::abs(k[0]));
        do {
            ++seen;
            if (window.contains(k)) {
                BigInt w = w0;
                for (std::size_t j = 1; j < k.size(); ++j) w *= sides[j] - std::abs(k[j]);
                local += w;
            }
        } while (advance(k, diff_half, 1, k.size()));
        subtotals[static_cast<std::size_t>(chunk)] = std::move(local);
        examined[static_cast<std::size_t>(chunk)] = seen;
    });

    CountResult result;
    result.method = CountMethod::diff_weight;
    result.exact_scales = boxes.exact;
    for (const BigInt& s : subtotals) result.count += s;
    for (std::uint64_t e : examined) result.points_examined += e;
    result.wall_time = seconds_since(start);
    return result;
}

CountResult sharpness_count(int d, std::int64_t t, const Rational& C, const CountOptions& opts) {
    if (d < 2) throw std::invalid_argument("sharpness count requires d >= 2");
    if (t < 1) throw std::invalid_argument("sharpness count requires t >= 1");
    const auto start = Clock::now();

    // q = t^{d+1}: q^{alpha_j} = t^d for j < d, q^{alpha_d} = q^beta = t^{2d}.
    BigInt td, t2d;
    mpz_ui_pow_ui(td.get_mpz_t(), static_cast<unsigned long>(t), static_cast<unsigned long>(d));
    t2d = td * td;

    Rational side_small = C * Rational(td);
    Rational side_big = C * Rational(t2d);
    const std::int64_t B_small = floor_rational_i64(side_small);
    const std::int64_t B_big = floor_rational_i64(side_big);
    const std::int64_t L_small = 2 * B_small + 1;
    const BigInt L_big = 2 * BigInt(static_cast<long>(B_big)) + 1;

    const std::size_t inner = static_cast<std::size_t>(d - 1);
    std::vector<std::int64_t> half(inner, L_small - 1);

    const std::int64_t n_chunks = 2 * (L_small - 1) + 1;
    std::vector<BigInt> subtotals(static_cast<std::size_t>(n_chunks));
    std::vector<std::uint64_t> examined(static_cast<std::size_t>(n_chunks), 0);
    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        IntVec u(inner);
        u[0] = -(L_small - 1) + chunk;
        for (std::size_t j = 1; j < inner; ++j) u[j] = -half[j];
        BigInt local(0);
        std::uint64_t seen = 0;
        do {
            ++seen;
            __int128 sum_sq = 0;
            for (std::size_t j = 0; j < inner; ++j)
                sum_sq += static_cast<__int128>(u[j]) * u[j];
            const BigInt kd = t2d + bigint_from_i128(sum_sq);
            const BigInt wd = L_big - abs(kd);
            if (wd > 0) {
                BigInt w = wd;
                for (std::size_t j = 0; j < inner; ++j) w *= L_small - std::abs(u[j]);
                local += w;
            }
        } while (advance(u, half, 1, inner));
        subtotals[static_cast<std::size_t>(chunk)] = std::move(local);
        examined[static_cast<std::size_t>(chunk)] = seen;
    });

    CountResult result;
    result.method = CountMethod::closed_form;
    for (const BigInt& s : subtotals) result.count += s;
    for (std::uint64_t e : examined) result.points_examined += e;
    result.wall_time = seconds_since(start);
    return result;
}

double theorem_bound(double q, double delta, int d, double beta) {
    if (q <= 0) throw std::invalid_argument("theorem bound requires q > 0");
    const double curvature_branch = std::pow(q, d - 2 + 2.0 / (d + 1));
    const double volume_branch = std::pow(q, d - beta) * delta;
    return std::max(curvature_branch, volume_branch);
}

} // namespace latshell
