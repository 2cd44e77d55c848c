// Copyright 2026 The qimg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qimg/encoders.hpp"
#include "test_support.hpp"

namespace qimg {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Feature of one patch computed with the dense-matrix oracle.
double OraclePatchFeature(const std::array<int, 4> &px) {
    std::vector<Gate> gates;
    for (int q = 0; q < 4; ++q) gates.push_back(Gate::rx(q, px[static_cast<std::size_t>(q)] / 255.0 * kHalfPi));
    for (int q = 0; q < 4; ++q) gates.push_back(Gate::crz(q, (q + 1) % 4, kHalfPi));
    for (int q = 0; q < 3; ++q) gates.push_back(Gate::cry(q, 3, kHalfPi));
    const auto v = testing::oracle_run(gates, 4);
    double z = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) z += ((i >> 3) & 1 ? -1.0 : 1.0) * std::norm(v[i]);
    return z;
}

TEST(PixelToAngle, EndpointsAndMidpoint) {
    EXPECT_EQ(pixel_to_angle(0).theta, 0.0);
    EXPECT_DOUBLE_EQ(pixel_to_angle(255).theta, kHalfPi);
    EXPECT_NEAR(pixel_to_angle(128).theta, 0.7884781561950853, 1e-15);
    EXPECT_THROW(pixel_to_angle(-1), ValidationError);
    EXPECT_THROW(pixel_to_angle(256), ValidationError);
}

TEST(PixelToAngle, StrictlyMonotone) {
    for (int p = 0; p < 255; ++p) EXPECT_LT(pixel_to_angle(p).theta, pixel_to_angle(p + 1).theta);
}

TEST(QcnnPatch, Examples) {
    EXPECT_EQ(qcnn_encode_patch(std::array{0, 0, 0, 0}), 1.0);
    // Frozen from an independent numpy evaluation of the same circuit.
    EXPECT_NEAR(qcnn_encode_patch(std::array{255, 255, 255, 255}), 0.0, 1e-12);
    EXPECT_NEAR(qcnn_encode_patch(std::array{255, 0, 0, 0}), 0.5, 1e-12);
    EXPECT_NEAR(qcnn_encode_patch(std::array{10, 200, 30, 140}), 0.6014587631816426, 1e-12);
    EXPECT_THROW(qcnn_encode_patch(std::array{0, 0, 0}), ValidationError);
    EXPECT_THROW(qcnn_encode_patch(std::array{0, 0, 0, 300}), ValidationError);
}

TEST(QcnnPatch, EntanglersInfluenceTheFeature) {
    // With the CRY pooling the readout depends on pixels other than the one on q3.
    EXPECT_NE(qcnn_encode_patch(std::array{0, 0, 0, 128}), qcnn_encode_patch(std::array{255, 0, 0, 128}));
}

TEST(QcnnPatch, MatchesOracleAndStaysInRange) {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<int, 4> px{};
        for (auto &p : px) p = static_cast<int>(rng.below(256));
        const double f = qcnn_encode_patch(px);
        EXPECT_NEAR(f, OraclePatchFeature(px), 1e-10);
        EXPECT_GE(f, -1.0);
        EXPECT_LE(f, 1.0);
    }
}

TEST(QcnnImage, AllZeroImages) {
    EXPECT_EQ(qcnn_encode_image(GrayImage(2, 2)).values, std::vector<double>{1.0});
    EXPECT_EQ(qcnn_encode_image(GrayImage(4, 4)).values, std::vector<double>(4, 1.0));
    EXPECT_THROW(qcnn_encode_image(GrayImage(3, 4)), ValidationError);
}

TEST(QcnnImage, PatchesInRowMajorOrder) {
    Rng rng(3);
    const auto img = testing::random_image(4, 4, rng);
    const auto f = qcnn_encode_image(img).values;
    ASSERT_EQ(f.size(), 4u);
    for (int py = 0; py < 2; ++py) {
        for (int px = 0; px < 2; ++px) {
            const std::array<int, 4> patch{img.at(2 * px, 2 * py), img.at(2 * px + 1, 2 * py), img.at(2 * px, 2 * py + 1),
                                           img.at(2 * px + 1, 2 * py + 1)};
            EXPECT_NEAR(f[static_cast<std::size_t>(py * 2 + px)], OraclePatchFeature(patch), 1e-10);
        }
    }
}

TEST(QcnnImage, RenderMapsFeatureRangeToBytes) {
    const auto img = qcnn_render(std::vector<double>{-1.0, 0.0, 1.0, 0.5}, 2, 2);
    EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{0, 128, 255, 191}));
}

TEST(Frqi, AllZeroAndAllMaxImages) {
    const auto zero = frqi_encode(GrayImage(2, 2, 0));
    const auto full = frqi_encode(GrayImage(2, 2, 255));
    ASSERT_EQ(zero.n_qubits(), 3);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(zero[i].real(), 0.5, 1e-15);
        EXPECT_NEAR(std::abs(zero[4 + i]), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(full[i]), 0.0, 1e-15);
        EXPECT_NEAR(full[4 + i].real(), 0.5, 1e-15);
    }
}

TEST(Frqi, TwoByTwoExpansion) {
    const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 64, 128, 255});
    for (auto mode : {EncodeMode::DirectAmplitude, EncodeMode::GateLevel}) {
        const auto s = frqi_encode(img, mode);
        for (std::size_t i = 0; i < 4; ++i) {
            const double theta = img.pixels[i] / 255.0 * kHalfPi;
            EXPECT_NEAR(s[i].real(), 0.5 * std::cos(theta), 1e-12);
            EXPECT_NEAR(s[4 + i].real(), 0.5 * std::sin(theta), 1e-12);
            EXPECT_NEAR(s[i].imag(), 0.0, 1e-12);
            EXPECT_NEAR(s[4 + i].imag(), 0.0, 1e-12);
        }
    }
}

TEST(Frqi, RejectsBadShapes) {
    EXPECT_THROW(frqi_encode(GrayImage(2, 4)), ValidationError);
    EXPECT_THROW(frqi_encode(GrayImage(3, 3)), ValidationError);
    EXPECT_THROW(frqi_encode(GrayImage(1, 1)), ValidationError);
    EXPECT_THROW(frqi_decode(new_zero_state(4), 2), ValidationError);
    EXPECT_THROW(frqi_decode(new_zero_state(3), 3), ValidationError);
}

TEST(Frqi, RoundTripAndModesAgree) {
    Rng rng(8);
    EXPECT_EQ(frqi_decode(frqi_encode(GrayImage(2, 2, 0)), 2), GrayImage(2, 2, 0));
    EXPECT_EQ(frqi_decode(frqi_encode(GrayImage(2, 2, 255)), 2), GrayImage(2, 2, 255));
    for (int side : {2, 4, 8}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto img = testing::random_image(side, side, rng);
            const auto direct = frqi_encode(img, EncodeMode::DirectAmplitude);
            EXPECT_NEAR(direct.norm_squared(), 1.0, 1e-10);
            EXPECT_EQ(frqi_decode(direct, side), img);
            if (trial < 10) {
                const auto gates = frqi_encode(img, EncodeMode::GateLevel);
                for (std::size_t i = 0; i < direct.dimension(); ++i) ASSERT_NEAR(std::abs(gates[i] - direct[i]), 0.0, 1e-10);
            }
        }
    }
}

TEST(Neqr, AllZeroImage) {
    const auto s = neqr_encode(GrayImage(2, 2));
    ASSERT_EQ(s.n_qubits(), 10);
    for (std::size_t i = 0; i < s.dimension(); ++i) EXPECT_NEAR(s[i].real(), i < 4 ? 0.5 : 0.0, 1e-15);
}

TEST(Neqr, BinaryExpansionOfIntensities) {
    const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 100, 200, 255});
    // Intensity bits above the two position bits: index = f * 4 + position.
    const std::array<std::size_t, 4> pattern{0b00000000, 0b01100100, 0b11001000, 0b11111111};
    for (auto mode : {EncodeMode::DirectAmplitude, EncodeMode::GateLevel}) {
        const auto s = neqr_encode(img, mode);
        for (std::size_t idx = 0; idx < s.dimension(); ++idx) {
            const std::size_t pos = idx & 3;
            const bool expected = (idx >> 2) == pattern[pos];
            EXPECT_NEAR(std::abs(s[idx]), expected ? 0.5 : 0.0, 1e-12) << idx;
        }
    }
}

TEST(Neqr, RoundTripIsExactAndModesAgree) {
    Rng rng(12);
    for (int side : {2, 4, 8}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto img = testing::random_image(side, side, rng);
            const auto direct = neqr_encode(img);
            EXPECT_EQ(neqr_decode(direct, side), img);
            if (side < 8 || trial < 5) {
                const auto gates = neqr_encode(img, EncodeMode::GateLevel);
                for (std::size_t i = 0; i < direct.dimension(); ++i) ASSERT_NEAR(std::abs(gates[i] - direct[i]), 0.0, 1e-10);
            }
        }
    }
}

TEST(Neqr, MalformedStatesAreRejected) {
    std::vector<Amplitude> amps(1 << 10, 0.0);
    // Position 0 carries patterns 0 and 1; the others carry pattern 0.
    amps[0] = 0.5 / std::sqrt(2.0);
    amps[4] = 0.5 / std::sqrt(2.0);
    amps[1] = amps[2] = amps[3] = 0.5;
    EXPECT_THROW(neqr_decode(StateVector(10, amps), 2), MalformedStateError);

    std::vector<Amplitude> missing(1 << 10, 0.0);
    missing[1] = missing[2] = missing[3] = 1.0 / std::sqrt(3.0);
    EXPECT_THROW(neqr_decode(StateVector(10, missing), 2), MalformedStateError);
    EXPECT_THROW(neqr_decode(new_zero_state(9), 2), ValidationError);
    EXPECT_THROW(neqr_encode(GrayImage(512, 512)), CapacityError);
}

TEST(ExtractFeatures, ExactExamples) {
    EXPECT_EQ(extract_features(GrayImage(4, 4), Method::FRQI).values, std::vector<double>(16, 0.0));
    EXPECT_EQ(extract_features(GrayImage(4, 4), Method::QCNN).values, std::vector<double>(4, 1.0));
    Rng rng(4);
    const auto img = testing::random_image(4, 4, rng);
    const auto neqr = extract_features(img, Method::NEQR);
    EXPECT_EQ(neqr.method, Method::NEQR);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_DOUBLE_EQ(neqr.values[i], img.pixels[i] / 255.0);
    const auto frqi = extract_features(img, Method::FRQI);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double s = std::sin(img.pixels[i] / 255.0 * kHalfPi);
        EXPECT_NEAR(frqi.values[i], s * s, 1e-12);
    }
}

TEST(ExtractFeatures, BoundsHold) {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto img = testing::random_image(8, 8, rng);
        for (double v : extract_features(img, Method::QCNN).values) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
        for (auto m : {Method::FRQI, Method::NEQR}) {
            for (double v : extract_features(img, m, trial % 2 ? 500 : 0, 3).values) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
    }
}

TEST(ExtractFeatures, SampledFrqiConverges) {
    Rng rng(30);
    const auto img = testing::random_image(4, 4, rng);
    const auto exact = extract_features(img, Method::FRQI).values;
    const auto sampled = extract_features(img, Method::FRQI, 100000, 77).values;
    for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(sampled[i], exact[i], 0.02);
    EXPECT_EQ(sampled, extract_features(img, Method::FRQI, 100000, 77).values);
}

TEST(ExtractFeatures, SampledQcnnAndNeqrConverge) {
    Rng rng(31);
    const auto img = testing::random_image(4, 4, rng);
    const auto qe = extract_features(img, Method::QCNN).values;
    const auto qs = extract_features(img, Method::QCNN, 20000, 5).values;
    for (std::size_t i = 0; i < qe.size(); ++i) EXPECT_NEAR(qs[i], qe[i], 0.04);
    // Without noise every sampled NEQR outcome carries the exact intensity.
    const auto ne = extract_features(img, Method::NEQR).values;
    const auto ns = extract_features(img, Method::NEQR, 5000, 5).values;
    for (std::size_t i = 0; i < ne.size(); ++i) EXPECT_NEAR(ns[i], ne[i], 1e-12);
}

}  // namespace
}  // namespace qimg
