#include <doctest.h>

#include <cmath>
#include <vector>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"
#include "gtp/rng.hpp"

using namespace gtp;

TEST_CASE("hurwitz zeta matches high-precision values") {
    struct Case {
        double s, a, expected;
    };
    // Reference values from mpmath.zeta(s, a) at 30 digits.
    const Case cases[] = {
        {2.0, 1.0, 1.6449340668482264365},
        {2.0, 5.0, 0.22132295573711532536},
        {4.0 / 3.0, 1.0, 3.6009377504588630823},
        {4.0 / 3.0, 10.0, 1.4161996614397683571},
        {1.234567901234568, 1.0, 4.8571830982643864787},
        {1.5, 1000.0, 0.063261368544514927291},
        {1.1111111111111112, 3.0, 8.1223086862991985462},
    };
    for (const auto& c : cases) {
        CAPTURE(c.s);
        CAPTURE(c.a);
        CHECK(hurwitz_zeta(c.s, c.a) == doctest::Approx(c.expected).epsilon(1e-13));
    }
    CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), NumericError);
}

TEST_CASE("neumaier sum recovers cancelled low-order bits") {
    NeumaierSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);
}

TEST_CASE("pairwise sum") {
    std::vector<double> v(1000, 0.1);
    CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(pairwise_sum({}) == 0.0);
}

TEST_CASE("wilson interval at 99%") {
    // Reference values from statsmodels proportion_confint(method="wilson", alpha=0.01).
    auto i1 = wilson_interval(0, 10000, 0.99);
    CHECK(i1.lo == 0.0);
    CHECK(i1.hi == doctest::Approx(0.0006630497334598375).epsilon(1e-12));
    auto i2 = wilson_interval(37, 10000, 0.99);
    CHECK(i2.lo == doctest::Approx(0.002431418626188442).epsilon(1e-12));
    CHECK(i2.hi == doctest::Approx(0.005626724539243793).epsilon(1e-12));
    auto i3 = wilson_interval(5, 20, 0.99);
    CHECK(i3.lo == doctest::Approx(0.08736390840107403).epsilon(1e-12));
    CHECK(i3.hi == doctest::Approx(0.5371887921483027).epsilon(1e-12));
    auto i4 = wilson_interval(20, 20, 0.99);
    CHECK(i4.lo == doctest::Approx(0.7508945989012465).epsilon(1e-12));
    CHECK(i4.hi == 1.0);
    CHECK(two_sided_normal_quantile(0.99) == doctest::Approx(2.5758293035489004).epsilon(1e-14));
}

TEST_CASE("format_real round-trips with 17 significant digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(2.5) == "2.5");
    CHECK(format_real(-3.0) == "-3");
    CHECK(format_real(0.0) == "0");
    CHECK(std::stod(format_real(1e-300)) == 1e-300);
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_real(x)) == x);
}

TEST_CASE("philox4x64-10 known answers") {
    // Reference blocks from numpy.random.Philox(key=..., counter=...).random_raw().
    using C = PhiloxCounter;
    using K = PhiloxKey;
    CHECK(philox4x64_10(C{0, 0, 0, 0}, K{0, 0}) ==
          C{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL});
    CHECK(philox4x64_10(C{1, 0, 0, 0}, K{123, 456}) ==
          C{0x182a33ef112a55c6ULL, 0x7fa21420170db5b7ULL, 0x3d065f703e33bef6ULL, 0x29ec19a7d6e63a9aULL});
    CHECK(philox4x64_10(C{2, 0, 0, 0}, K{123, 456}) ==
          C{0x280c361dcea8055eULL, 0x0de096e158cf6aa5ULL, 0x47958d4675ff3bfaULL, 0xdebe3ce8f8da523eULL});
    CHECK(philox4x64_10(C{3, 9, 0, 0}, K{7, 11}) ==
          C{0xebaea8e812c6a9f9ULL, 0x2d9afbe418ae79c9ULL, 0x3d152d44065c9e08ULL, 0x58eae4b7f34273c3ULL});
    CHECK(philox4x64_10(C{0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                        K{0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL}) ==
          C{0xa528f45403e61d95ULL, 0x38c72dbd566e9788ULL, 0xa5a1610e72fd18b5ULL, 0x57bd43b5e52b7fe6ULL});
}

TEST_CASE("counter rng is stateless and maps into the open unit interval") {
    CounterRng a(42, 3), b(42, 3), c(42, 4);
    CHECK(a.block(17) == b.block(17));
    CHECK(a.block(17) != c.block(17));
    CHECK(a.block(17, 0) != a.block(17, 1));
    CHECK(CounterRng::to_open_unit(0) > 0.0);
    CHECK(CounterRng::to_open_unit(~0ULL) < 1.0);
}
