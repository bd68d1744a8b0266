#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "test_support.hpp"
#include "vmci/density.hpp"
#include "vmci/estimators.hpp"
#include "vmci/rng.hpp"
#include "vmci/synth.hpp"

using namespace vmci;

namespace {

SampleMatrix uniform_columns(std::size_t n, std::vector<std::string> names, std::uint64_t seed) {
    SampleMatrix m(names, n);
    SplitMix64 rng(seed);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < names.size(); ++c) m(r, c) = rng.uniform();
    return m;
}

}  // namespace

TEST_CASE("split_rows gives a ceil/floor partition of a permutation") {
    for (std::size_t n : {4, 5, 10, 11, 1001}) {
        const auto s = split_rows(n, 9);
        CHECK(s.fit_rows.size() == (n + 1) / 2);
        CHECK(s.eval_rows.size() == n / 2);
        std::set<std::size_t> all(s.fit_rows.begin(), s.fit_rows.end());
        all.insert(s.eval_rows.begin(), s.eval_rows.end());
        CHECK(all.size() == n);
        CHECK(*all.rbegin() == n - 1);
    }
    CHECK(split_rows(100, 1).fit_rows != split_rows(100, 2).fit_rows);
}

TEST_CASE("entropy_vm preconditions") {
    CHECK_THROWS_AS(entropy_vm(uniform_columns(2, {"x"}, 1), {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(entropy_vm(uniform_columns(3, {"x"}, 1), {}, 0), std::invalid_argument);
    auto m = uniform_columns(10, {"x"}, 1);
    m(4, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(entropy_vm(m, {}, 0), std::invalid_argument);
}

TEST_CASE("entropy_vm bookkeeping invariants and determinism") {
    const auto data = sample_power_law(1001, 3, 4);
    const auto e = entropy_vm(data, {}, 77);
    CHECK(e.n_fit + e.n_eval == e.n_total);
    CHECK(e.n_fit == 501);
    CHECK(e.n_eval == 500);
    CHECK(e.floor_hits <= e.n_eval);
    CHECK(e.beta == 3);
    CHECK(e.bandwidth_h == compute_bandwidth({0.35, 3, 1}, 1001));
    CHECK(entropy_vm(data, {}, 77) == e);
}

TEST_CASE("entropy_vm equals a hand-rolled estimate on the same split") {
    const auto data = sample_power_law(200, 3, 8);
    const auto split = split_rows(200, 3);
    const auto e = entropy_vm(data, {}, split);
    const auto fit = data.select_rows(split.fit_rows);
    const auto kde = fit_kde(fit, KernelSpec(3, 1), {0.35, 3, 1}, 200);
    double s = 0.0;
    for (auto r : split.eval_rows) s -= std::log(kde.eval(data.row(r)));
    CHECK(e.value == doctest::Approx(s / static_cast<double>(split.eval_rows.size())).epsilon(1e-13));
}

TEST_CASE("uniform entropy near zero at n=4000") {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        errs.push_back(std::abs(entropy_vm(uniform_columns(4000, {"x"}, seed), {}, seed).value));
    CHECK(testing::median(errs) < 0.08);
}

TEST_CASE("power-law entropy near closed form and improving with n") {
    const double target = power_law_entropy(3);
    CHECK(target == doctest::Approx(-0.66407).epsilon(1e-5));
    std::vector<double> small, large;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        small.push_back(std::abs(entropy_vm(sample_power_law(250, 3, seed), {}, seed).value - target));
        large.push_back(std::abs(entropy_vm(sample_power_law(4000, 3, seed + 500), {}, seed).value - target));
    }
    CHECK(testing::median(large) < 0.10);
    CHECK(testing::median(large) < testing::median(small));
}

TEST_CASE("plug-in oracle reference values") {
    auto one = [](std::span<const double>) { return 1.0; };
    CHECK(std::abs(entropy_plugin_oracle(one, {{0.0, 1.0}}, 100)) < 1e-12);
    auto two = [](std::span<const double>) { return 2.0; };
    CHECK(entropy_plugin_oracle(two, {{0.0, 0.5}}, 100) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    auto pl = [](std::span<const double> x) { return 4.15 * std::pow(x[0], 3.15); };
    CHECK(std::abs(entropy_plugin_oracle(pl, {{0.0, 1.0}}, 10000) - (-0.66407)) < 1e-3);
    auto uu = [](std::span<const double>) { return 1.0; };
    CHECK(std::abs(entropy_plugin_oracle(uu, {{0.0, 1.0}, {0.0, 1.0}}, 50)) < 1e-12);
    CHECK_THROWS_AS(entropy_plugin_oracle(uu, {{0, 1}, {0, 1}, {0, 1}}, 10), std::invalid_argument);
}

TEST_CASE("Von Mises estimate agrees with the plug-in integral of the same KDE") {
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = sample_power_law(4000, 3, seed + 40);
        const auto split = split_rows(4000, seed);
        const auto vm = entropy_vm(data, {}, split);
        const auto kde = fit_kde(data.select_rows(split.fit_rows), KernelSpec(3, 1), {0.35, 3, 1}, 4000);
        const double h = kde.bandwidth();
        const double plug = entropy_plugin_oracle([&](std::span<const double> p) { return kde.eval(p); },
                                                  {{-h, 1.0 + h}}, 20000, kde.floor());
        gaps.push_back(std::abs(vm.value - plug));
    }
    CHECK(testing::median(gaps) < 0.05);
}

TEST_CASE("cmi_vm arithmetic identity, symmetry and determinism") {
    const auto data = sample_mixture(600, MixtureSpec{3, 0.2, 0.1, 0.3}, 2);
    const auto a = cmi_vm(data, "X", "Y", {"Z1", "Z2"}, {}, 11);
    CHECK(a.value == ((a.h_xz.value + a.h_yz.value) - a.h_z->value) - a.h_xyz.value);
    CHECK(a.d_z == 2);
    CHECK(a.warnings.empty());
    const auto b = cmi_vm(data, "Y", "X", {"Z2", "Z1"}, {}, 11);
    CHECK(b.value == a.value);
    CHECK(cmi_vm(data, "X", "Y", {"Z1", "Z2"}, {}, 11) == a);
}

TEST_CASE("cmi_vm per-term bandwidth exponents") {
    const auto data = sample_mixture(500, MixtureSpec{}, 1);
    const auto e = cmi_vm(data, "X", "Y", {"Z1", "Z2"}, {}, 3);
    CHECK(e.h_xyz.bandwidth_h == compute_bandwidth({0.35, 3, 4}, 500));
    CHECK(e.h_xz.bandwidth_h == compute_bandwidth({0.35, 3, 3}, 500));
    CHECK(e.h_yz.bandwidth_h == compute_bandwidth({0.35, 3, 3}, 500));
    CHECK(e.h_z->bandwidth_h == compute_bandwidth({0.35, 3, 2}, 500));

    CmiParams p;
    p.gamma_z = 0.5;
    const auto o = cmi_vm(data, "X", "Y", {"Z1", "Z2"}, p, 3);
    CHECK(o.h_z->bandwidth_h == compute_bandwidth({0.5, 3, 2}, 500));
    CHECK(o.h_xyz.bandwidth_h == e.h_xyz.bandwidth_h);
}

TEST_CASE("cmi_vm parallel terms are bit-identical to sequential") {
    const auto data = sample_mixture(800, MixtureSpec{}, 6);
    CmiParams par;
    par.parallel_terms = true;
    CHECK(cmi_vm(data, "X", "Y", {"Z1", "Z2"}, par, 4) == cmi_vm(data, "X", "Y", {"Z1", "Z2"}, {}, 4));
}

TEST_CASE("cmi_vm input validation and smoothness warning") {
    const auto data = sample_mixture(100, MixtureSpec{}, 1);
    CHECK_THROWS_AS(cmi_vm(data, "X", "X", {}, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(cmi_vm(data, "X", "Y", {"X"}, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(cmi_vm(data, "X", "Q", {}, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(cmi_vm(data.select_rows(std::vector<std::size_t>{0, 1, 2}), "X", "Y", {}, {}, 0),
                    std::invalid_argument);
    CmiParams p;
    p.beta = 1;
    const auto w = cmi_vm(data, "X", "Y", {"Z1"}, p, 0);
    CHECK(w.warnings.size() == 1);
    CHECK(std::isfinite(w.value));
}

TEST_CASE("cmi_vm without conditioning degenerates to mutual information") {
    const auto one = cmi_vm(sample_mixture(300, MixtureSpec{}, 2), "X", "Y", {}, {}, 1);
    CHECK_FALSE(one.h_z.has_value());
    CHECK(one.d_z == 0);
    CHECK(one.value == (one.h_xz.value + one.h_yz.value) - one.h_xyz.value);

    std::vector<double> vals;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        vals.push_back(std::abs(cmi_vm(uniform_columns(4000, {"X", "Y"}, seed), "X", "Y", {}, {}, seed).value));
    CHECK(testing::median(vals) < 0.05);
}

TEST_SUITE("mixture_cmi") {
    TEST_CASE("null mixture statistic stays below half of I_min") {
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
            ok += std::abs(cmi_vm(sample_mixture(2000, MixtureSpec{3, 0.2, 0.2, 0.0}, seed), "X", "Y", {"Z1", "Z2"},
                                  {}, seed)
                               .value) < 0.055;
        MESSAGE("null runs below 0.055: " << ok << "/50");
        CHECK(ok >= 45);
    }

    TEST_CASE("alternative mixture statistic exceeds half of I_min") {
        int ok = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
            ok += cmi_vm(sample_mixture(2000, MixtureSpec{3, 0.2, 0.1, 0.3}, seed), "X", "Y", {"Z1", "Z2"}, {}, seed)
                      .value > 0.055;
        MESSAGE("alternative runs above 0.055: " << ok << "/50");
        CHECK(ok >= 45);
    }
}
