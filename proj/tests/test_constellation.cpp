#include <onebit/constellation.hpp>

#include <catch_amalgamated.hpp>

using namespace onebit;
using Catch::Approx;

TEST_CASE("q_function values", "[constellation]")
{
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(40.0) <= 1e-300);
    // Reference from the complementary error function: Q(1.6449) = 0.5 erfc(1.6449/sqrt 2).
    CHECK(q_function(1.6449) == Approx(0.0500).margin(1e-4));
    double prev = 1.0;
    for (double x = -5.0; x <= 5.0; x += 0.25)
    {
        const double q = q_function(x);
        CHECK(q >= 0.0);
        CHECK(q <= 1.0);
        CHECK(q <= prev);
        prev = q;
    }
}

TEST_CASE("constellation construction", "[constellation]")
{
    for (int order : {2, 4, 8, 16})
    {
        PskConstellation c(order);
        REQUIRE(static_cast<int>(c.points().size()) == order);
        for (int l = 0; l < order; ++l)
        {
            CHECK(std::abs(std::abs(c.point(l)) - 1.0) <= 1e-12);
            if (l > 0)
                CHECK(std::arg(c.point(l) * std::conj(c.point(l - 1))) > 0.0);
        }
    }
    for (int bad : {0, 1, 3, 6, 32})
        CHECK_THROWS_AS(PskConstellation(bad), std::invalid_argument);
}

TEST_CASE("decision rule examples", "[constellation]")
{
    PskConstellation qpsk(4);
    CHECK(qpsk.decide_index({1.0, 0.1}) == 0);
    CHECK(qpsk.decide_index({-1.0, 0.0}) == 2);
    // Boundary points belong to the counter-clockwise sector.
    CHECK(qpsk.decide_index(std::polar(1.0, pi / 4)) == 1);
    CHECK(qpsk.decide_index({0.0, 0.0}) == 0);
    CHECK(qpsk.decide(std::polar(1.0, pi / 4)) == qpsk.point(1));
}

TEST_CASE("margin examples", "[constellation]")
{
    CHECK(margin({2.0, 0.0}, PskConstellation(4)) == 2.0);
    CHECK(margin({1.0, 0.5}, PskConstellation(4)) == Approx(0.5).epsilon(1e-15));
    CHECK(margin({1.0, 5.0}, PskConstellation(2)) == 1.0);
}

TEST_CASE("margin sign agrees with the decision sector", "[constellation][property]")
{
    for (int order : {2, 4, 8, 16})
    {
        PskConstellation c(order);
        for (int i = -60; i <= 60; ++i)
            for (int j = -60; j <= 60; ++j)
            {
                const cplx z(0.05 * i + 0.013, 0.05 * j + 0.007);
                const double a = margin(z, c);
                const int d = c.decide_index(z);
                if (d != 0)
                    CHECK(a <= 0.0);
                if (a > 1e-9)
                    CHECK(d == 0);
            }
    }
}

TEST_CASE("SEP upper bound", "[constellation]")
{
    PskConstellation qpsk(4);
    CHECK(sep_upper_bound(0.0, 0.7, qpsk) == Approx(1.0).epsilon(1e-15));
    CHECK(sep_upper_bound(1e3, 1.0, qpsk) == 0.0);
    // 2 Q(alpha sin(pi/4) / (sigma / sqrt 2)) with alpha = 1, sigma^2 = 2.
    CHECK(sep_upper_bound(1.0, 2.0, qpsk) == Approx(2.0 * q_function(std::sin(pi / 4))).epsilon(1e-14));
    CHECK(sep_upper_bound(1.0, 2.0, qpsk) == Approx(0.4795).margin(1e-4));
    CHECK_THROWS_AS(sep_upper_bound(1.0, 0.0, qpsk), std::invalid_argument);
    CHECK_THROWS_AS(sep_upper_bound(1.0, -1.0, qpsk), std::invalid_argument);
    for (double a = 0.0; a < 3.0; a += 0.1)
    {
        CHECK(sep_upper_bound(a + 0.1, 1.0, qpsk) <= sep_upper_bound(a, 1.0, qpsk));
        CHECK(sep_upper_bound(a, 1.0, qpsk) <= sep_upper_bound(a, 1.5, qpsk));
    }
}

TEST_CASE("empirical SER stays below the SEP bound", "[constellation][montecarlo]")
{
    Rng rng = derive_rng(5, {42});
    for (int order : {4, 8})
    {
        PskConstellation c(order);
        const int l = 1;
        const cplx s = c.point(l);
        const cplx z(0.8, 0.15); // rotated noiseless point, margin > 0
        const double sigma2 = 0.2;
        const int draws = 100000;
        int errors = 0;
        for (int i = 0; i < draws; ++i)
            errors += c.decide_index(z * s + sample_cn(rng, sigma2)) != l ? 1 : 0;
        const double bound = std::min(1.0, sep_upper_bound(margin(z, c), sigma2, c));
        const double ser = static_cast<double>(errors) / draws;
        CHECK(ser <= bound + 3.0 * std::sqrt(bound * (1.0 - bound) / draws));
    }
}

TEST_CASE("Gray labels", "[constellation]")
{
    PskConstellation qpsk(4);
    CHECK(gray_bits(0, qpsk) == "00");
    CHECK(gray_bits(1, qpsk) == "01");
    CHECK(gray_bits(2, qpsk) == "11");
    CHECK(gray_bits(3, qpsk) == "10");
    for (int order : {2, 4, 8, 16})
        for (int l = 0; l < order; ++l)
            CHECK(bit_errors(l, (l + 1) % order, order) == 1);
    CHECK_THROWS_AS(gray_label(0, 6), std::invalid_argument);
    CHECK_THROWS_AS(gray_label(4, 4), std::out_of_range);
}

TEST_CASE("symbol frame", "[constellation]")
{
    PskConstellation c(8);
    Rng a = derive_rng(1, {stream::symbols});
    Rng b = derive_rng(1, {stream::symbols});
    const SymbolFrame f = SymbolFrame::random(c, 3, 7, a);
    const SymbolFrame g = SymbolFrame::random(c, 3, 7, b);
    CHECK(f.indices() == g.indices());
    CHECK(f.users() == 3);
    CHECK(f.slots() == 7);
    CHECK(f.slot(2)(1) == f.symbol(1, 2));
    Eigen::MatrixXi bad(1, 1);
    bad(0, 0) = 8;
    CHECK_THROWS_AS(SymbolFrame(c, bad), std::invalid_argument);
}
