#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "uavloc/fim.hpp"

using namespace uavloc;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Hand-evaluated bound for equal M, equal r, h.
double closed_form_regular(double gamma, const std::vector<double>& var, int m, double r, double h) {
    const double k = 10.0 * gamma / std::log(10.0);
    const double d2 = r * r + h * h;
    double s = 0.0;
    for (double v : var) s += m / v * r * r / (d2 * d2);
    return 0.25 * std::pow(k, 4) * s * s;
}

MeasurementPlan hover(const std::vector<double>& angles_deg, int m, double r, double h) {
    std::vector<std::vector<MeasurementPose>> poses;
    for (double a : angles_deg) poses.emplace_back(m, MeasurementPose(r, h, a * kDegToRad));
    return MeasurementPlan(poses);
}

MeasurementPlan random_plan(std::mt19937_64& rng, const Scenario& s) {
    std::uniform_real_distribution<double> r(0.0, 300.0), h(10.0, 300.0), b(0.0, 2 * kPi);
    std::vector<std::vector<MeasurementPose>> poses(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        for (int j = 0; j < s.uav(i).measurements; ++j) poses[i].emplace_back(r(rng), h(rng), b(rng));
    return MeasurementPlan(poses);
}

}  // namespace

TEST(Bearing, Examples) {
    EXPECT_NEAR(bearing(0).x, 0.0, 1e-15);
    EXPECT_NEAR(bearing(0).y, 1.0, 1e-15);
    EXPECT_NEAR(bearing(kPi / 2).x, 1.0, 1e-15);
    EXPECT_NEAR(bearing(kPi / 2).y, 0.0, 1e-15);
    EXPECT_NEAR(bearing(kPi / 4).x, std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(bearing(kPi / 4).y, std::sqrt(0.5), 1e-15);
    for (double b = 0; b < 7; b += 0.37) EXPECT_NEAR(bearing(b).vec().norm(), 1.0, 1e-12);
}

TEST(Fim, SingleMeasurementIsSingular) {
    const auto s = Scenario::uniform(0, 3, {4.0}, 1);
    const auto f = fim(hover({37}, 1, 80, 100), s);
    EXPECT_TRUE(f.singular);
    EXPECT_FALSE(f.crlb_trace);
    EXPECT_NEAR(f.det, 0.0, 1e-12 * f.matrix.squaredNorm());
}

TEST(Fim, OrthogonalPair) {
    const auto s = Scenario::uniform(0, 3, {16.0, 16.0}, 1);
    const auto plan = hover({0, 90}, 1, 100, 100);
    const double w = 1.0 / 16.0 * 1e4 / std::pow(2e4, 2);
    const double k2 = std::pow(rss_slope(3), 2);
    const auto f = fim(plan, s);
    EXPECT_LT((f.matrix - k2 * w * Eigen::Matrix2d::Identity()).norm(), 1e-12 * k2 * w);
    EXPECT_LT(rel(f.det, std::pow(k2 * w, 2)), 1e-12);
    EXPECT_LT(rel(*f.crlb_trace, 2.0 / (k2 * w)), 1e-12);
}

TEST(Fim, CaseAMatchesRegularBound) {
    const auto s = Scenario::uniform(0, 3, {16.0, 16.0, 16.0}, 16);
    const auto f = fim(hover({0, 60, 120}, 16, 100, 100), s);
    EXPECT_NEAR(std::pow(rss_slope(3), 4), 2.8815e4, 0.5);
    EXPECT_LT(rel(f.det, closed_form_regular(3, {16, 16, 16}, 16, 100, 100)), 1e-9);
}

TEST(Fim, SymmetricPsd) {
    std::mt19937_64 rng(3);
    const Scenario s(0, 2.7, {{4, 3}, {9, 5}, {16, 1}});
    for (int n = 0; n < 200; ++n) {
        const auto f = fim(random_plan(rng, s), s);
        const double scale = f.matrix.norm();
        EXPECT_LE(std::abs(f.matrix(0, 1) - f.matrix(1, 0)), 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(f.matrix);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * scale);
        EXPECT_GE(f.det, -1e-10 * scale * scale);
    }
}

TEST(Fim, FiniteDifferenceOracle) {
    std::mt19937_64 rng(11);
    const Scenario s(5.0, 3.0, {{16, 16}, {12, 16}, {8, 16}});
    const TargetPosition t{12.0, -40.0};
    for (int n = 0; n < 50; ++n) {
        const auto plan = random_plan(rng, s);
        const Eigen::Matrix2d a = fim(plan, t, s).matrix;
        const Eigen::Matrix2d b = fim_fd_oracle(plan, t, s);
        EXPECT_LT((a - b).norm() / a.norm(), 1e-6);
    }
    // rank one, single measurement
    const auto one = Scenario::uniform(0, 3, {2.0}, 1);
    const auto p1 = hover({200}, 1, 70, 90);
    const Eigen::Matrix2d a = fim(p1, one).matrix;
    EXPECT_LT((a - fim_fd_oracle(p1, t, one)).norm() / a.norm(), 1e-6);
}

TEST(Fim, RotationInvariance) {
    std::mt19937_64 rng(5);
    const Scenario s(0, 3, {{16, 4}, {12, 2}, {8, 3}});
    for (int n = 0; n < 100; ++n) {
        const auto plan = random_plan(rng, s);
        const double delta = std::uniform_real_distribution<double>(-7, 7)(rng);
        const auto a = fim(plan, s), b = fim(plan.rotated(delta), s);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ea(a.matrix), eb(b.matrix);
        EXPECT_LT(rel(b.det, a.det), 1e-9);
        EXPECT_LT(rel(eb.eigenvalues()(1), ea.eigenvalues()(1)), 1e-9);
    }
}

TEST(Bounds, RegularExamples) {
    EXPECT_EQ(max_det_regular({{0, 0, 0}, 3}), 0.0);
    EXPECT_NEAR(max_det_regular({{1.0}, 3}), 7203.8, 0.05);
    EXPECT_NEAR(max_det_regular({{0.5, 0.25, 0.25}, 3}), 7203.8, 0.05);
    const double w = 2.5;
    EXPECT_LT(rel(max_det_regular({{w}, 3}), 0.25 * std::pow(rss_slope(3), 4) * w * w), 1e-14);
}

TEST(Bounds, IrregularExamples) {
    EXPECT_EQ(max_det_irregular({{1, 0, 0}, 3}, 0), 0.0);
    EXPECT_NEAR(max_det_irregular({{0.5, 0.25, 0.25}, 3}, 0), 7203.8, 0.05);
    // equal at the boundary w_k = half the total
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int n = 0; n < 100; ++n) {
        std::vector<double> w{0, u(rng), u(rng), u(rng)};
        w[0] = w[1] + w[2] + w[3];
        const WeightSet ws{w, 2.0 + u(rng)};
        EXPECT_LT(rel(max_det_irregular(ws, 0), max_det_regular(ws)), 1e-12);
    }
}

TEST(Bounds, DetNeverExceedsBounds) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> b(0, 2 * kPi), w(0.0, 3.0);
    for (int n = 0; n < 1000; ++n) {
        const int count = 2 + n % 6;
        const double gamma = 3.0;
        std::vector<double> weights(count);
        Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
        for (auto& x : weights) {
            x = w(rng);
            const auto v = bearing(b(rng)).vec();
            g += x * v * v.transpose();
        }
        const double det = std::pow(rss_slope(gamma), 4) * g.determinant();
        const WeightSet ws{weights, gamma};
        EXPECT_LE(det, max_det_regular(ws) * (1 + 1e-12));
        const auto k = std::distance(weights.begin(), std::max_element(weights.begin(), weights.end()));
        if (2 * weights[k] > ws.sum())
            EXPECT_LE(det, max_det_irregular(ws, k) * (1 + 1e-12));
    }
}

TEST(Weights, Aggregated) {
    const Scenario s(0, 3, {{16, 16}, {8, 4}});
    const auto ws = aggregated_weights(s, 100, 100);
    ASSERT_EQ(ws.weights.size(), 2u);
    EXPECT_LT(rel(ws.weights[0], 16.0 / 16.0 * 1e4 / 4e8), 1e-14);
    EXPECT_LT(rel(ws.weights[1], 4.0 / 8.0 * 1e4 / 4e8), 1e-14);
    EXPECT_EQ(measurement_weight(1.0, MeasurementPose(0, 10, 0)), 0.0);
}
