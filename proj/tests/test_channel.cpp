#include <onebit/channel_io.hpp>

#include <catch_amalgamated.hpp>

using namespace onebit;
using Catch::Approx;

TEST_CASE("path loss", "[channel]")
{
    CHECK(path_loss(1.0, 0.3, 2.7) == 0.3);
    CHECK(path_loss(17.0, 0.3, 0.0) == 0.3);
    const double g = std::pow(10.0, -1.5);
    CHECK(path_loss(30.0, g, 3.2) == Approx(g * std::pow(30.0, -3.2)).epsilon(1e-14));
    // -15 dB - 32 log10(30) dB = -62.268 dB.
    CHECK(10.0 * std::log10(path_loss(30.0, db_to_linear(-15.0), 3.2)) == Approx(-62.2679).margin(1e-3));
    CHECK_THROWS_AS(path_loss(0.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(-1.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("scenario sampling", "[channel]")
{
    ScenarioConfig cfg;
    cfg.user_radius = 0.0;
    cfg.users = 3;
    Rng rng = derive_rng(3, {stream::scenario});
    const Scenario at_center = sample_scenario(cfg, rng);
    for (const auto &u : at_center.users)
        CHECK(distance(at_center.bs, u) == Approx(30.0).epsilon(1e-15));

    ScenarioConfig wide;
    wide.users = 10000;
    Rng r1 = derive_rng(9, {stream::scenario});
    const Scenario sc = sample_scenario(wide, r1);
    double mx = 0.0, my = 0.0;
    for (const auto &u : sc.users)
    {
        mx += u.x;
        my += u.y;
        CHECK(distance(u, wide.user_center) <= wide.user_radius + 1e-12);
    }
    mx /= wide.users;
    my /= wide.users;
    // Uniform disk of radius R: per-coordinate variance R^2 / 4.
    const double se = std::sqrt(wide.user_radius * wide.user_radius / 4.0 / wide.users);
    CHECK(std::abs(mx - 30.0) <= 3.0 * se);
    CHECK(std::abs(my) <= 3.0 * se);

    Rng r2 = derive_rng(9, {stream::scenario});
    const Scenario again = sample_scenario(wide, r2);
    for (std::size_t i = 0; i < sc.users.size(); ++i)
    {
        CHECK(again.users[i].x == sc.users[i].x);
        CHECK(again.users[i].y == sc.users[i].y);
    }
}

TEST_CASE("channel statistics follow the path loss", "[channel]")
{
    Scenario sc;
    sc.bs = {0.0, 0.0};
    sc.irs = {20.0, 10.0};
    sc.users = {{30.0, 0.0}};
    sc.bs_user = {db_to_linear(-15.0), 3.2};
    sc.bs_irs = {db_to_linear(-10.0), 2.2};
    sc.irs_user = {db_to_linear(-10.0), 2.2};
    Rng rng = derive_rng(4, {stream::channels});
    const ChannelSet ch = sample_channels(sc, 100000, 1, rng);
    const double pl = path_loss(30.0, sc.bs_user);
    CHECK(ch.direct.squaredNorm() / 100000.0 == Approx(pl).epsilon(0.02));
    const double pl_bi = path_loss(distance(sc.bs, sc.irs), sc.bs_irs);
    CHECK(ch.bs_irs.squaredNorm() / 100000.0 == Approx(pl_bi).epsilon(0.02));

    // Cascade gain: product of the two hops equals the -20 dB concatenated model.
    const double cascade = path_loss(distance(sc.bs, sc.irs), sc.bs_irs) * path_loss(distance(sc.irs, sc.users[0]), sc.irs_user);
    const double expected = db_to_linear(-20.0) * std::pow(distance(sc.bs, sc.irs), -2.2) *
                            std::pow(distance(sc.irs, sc.users[0]), -2.2);
    CHECK(cascade == Approx(expected).epsilon(1e-12));

    Scenario zero = sc;
    zero.bs_user.ref_gain = zero.bs_irs.ref_gain = zero.irs_user.ref_gain = 0.0;
    Rng r0 = derive_rng(4, {stream::channels});
    const ChannelSet z = sample_channels(zero, 4, 3, r0);
    CHECK(z.direct.squaredNorm() == 0.0);
    CHECK(z.bs_irs.squaredNorm() == 0.0);
    CHECK(z.irs_user.squaredNorm() == 0.0);

    Rng a = derive_rng(4, {stream::channels});
    Rng b = derive_rng(4, {stream::channels});
    CHECK(sample_channels(sc, 5, 3, a).bs_irs == sample_channels(sc, 5, 3, b).bs_irs);
}

TEST_CASE("effective channel", "[channel]")
{
    Rng rng = derive_rng(6, {1});
    ChannelSet ch = sample_iid_channels(6, 4, 3, rng);
    const PhaseShifts th = PhaseShifts::random(4, rng);

    // G = 0 leaves the direct link.
    const ChannelSet direct = without_irs(ch);
    for (int k = 0; k < 3; ++k)
        CHECK((effective_channel(direct, th, k) - ch.direct.row(k).conjugate()).norm() == 0.0);

    // h_{r,k}^H Theta G against theta^T W_{r,k}^H G.
    for (int k = 0; k < 3; ++k)
    {
        const CMat theta_diag = th.values().asDiagonal();
        const CRowVec ref = ch.direct.row(k).conjugate() + ch.irs_user.row(k).conjugate() * theta_diag * ch.bs_irs;
        CHECK((effective_channel(ch, th, k) - ref).cwiseAbs().maxCoeff() <= 1e-12);
    }

    // Scalar case by hand.
    ChannelSet s{CMat::Constant(1, 1, cplx(1.0, 2.0)), CMat::Constant(1, 1, cplx(0.5, -1.0)),
                 CMat::Constant(1, 1, cplx(-1.0, 1.0))};
    const PhaseShifts j(CVec::Constant(1, cplx(0.0, 1.0)));
    // conj(1+2j) + j * conj(-1+j) * (0.5-j) = (1-2j) + (-0.5-1.5j)
    const cplx expect = cplx(1.0, -2.0) + cplx(0.0, 1.0) * std::conj(cplx(-1.0, 1.0)) * cplx(0.5, -1.0);
    CHECK(std::abs(effective_channel(s, j, 0)(0) - expect) <= 1e-15);
    CHECK(std::abs(expect - cplx(0.5, -3.5)) <= 1e-15);

    CHECK_THROWS_AS(effective_channel(ch, th, 3), std::out_of_range);
    CHECK_THROWS_AS(effective_channel(ch, th, -1), std::out_of_range);
}

TEST_CASE("phase shifts", "[channel]")
{
    CHECK_THROWS_AS(PhaseShifts(CVec::Constant(2, cplx(0.5, 0.0))), std::invalid_argument);
    Rng rng = derive_rng(2, {5});
    const PhaseShifts th = PhaseShifts::random(5, rng);
    const PhaseShifts back = PhaseShifts::from_lifted(th.lifted());
    CHECK((back.values() - th.values()).norm() <= 1e-15);
    Vec zero = Vec::Zero(2);
    CHECK(PhaseShifts::from_lifted(zero).values()(0) == cplx(1.0, 0.0));
}

TEST_CASE("fixture JSON round trip", "[channel][io]")
{
    ScenarioConfig cfg;
    cfg.users = 2;
    Rng rng = derive_rng(8, {stream::scenario});
    const Scenario sc = sample_scenario(cfg, rng);
    const ChannelSet ch = sample_channels(sc, 4, 3, rng);
    const json j = json::parse(fixture_to_json(sc, ch).dump());
    const ChannelSet back = channels_from_json(j);
    CHECK(back.direct == ch.direct);
    CHECK(back.bs_irs == ch.bs_irs);
    CHECK(back.irs_user == ch.irs_user);
    const Scenario sc2 = scenario_from_json(j.at("scenario"));
    CHECK(sc2.users.size() == 2);
    CHECK(sc2.users[1].x == sc.users[1].x);
    CHECK(sc2.bs_user.exponent == 3.2);

    json broken = j;
    broken["h_d"].erase(0);
    CHECK_THROWS_AS(channels_from_json(broken), std::invalid_argument);
}
