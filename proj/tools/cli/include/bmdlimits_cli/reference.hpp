#pragma once

// Published figures the repro manifest and the acceptance checks compare
// against.

#include <array>
#include <cstdint>
#include <optional>

namespace bmdlimits::reference {

inline constexpr std::array<double, 5> kMargins{0.01, 0.02, 0.03, 0.04, 0.05};
inline constexpr std::array<double, 2> kDetectRates{0.07, 0.25};
inline constexpr std::array<double, 3> kBaseRates{0.005, 0.01, 0.015};

// Minimum contest sizes, [margin][detect][base], fp = fn = 5%.
inline constexpr std::uint64_t kPassive5[5][2][3] = {
    {{451411, 893176, 1334897}, {37334, 71911, 106627}},
    {{115150, 225706, 336160}, {9919, 18667, 27325}},
    {{52310, 101382, 150471}, {4651, 8588, 12445}},
    {{30000, 57575, 85227}, {2788, 4960, 7144}},
    {{19573, 37245, 54932}, {1838, 3274, 4689}},
};

// Same grid at fp = fn = 1%.
inline constexpr std::uint64_t kPassive1[5][2][3] = {
    {{908590, 1792330, 2675912}, {76077, 145501, 214845}},
    {{233261, 454295, 675242}, {20624, 38039, 55442}},
    {{106411, 204651, 302864}, {9870, 17674, 25359}},
    {{61385, 116631, 171908}, {5971, 10312, 14681}},
    {{40156, 75671, 110989}, {4036, 6849, 9650}},
};

struct TrainingRow {
  double confidence;
  std::optional<std::uint64_t> tests;  // nullopt: unlimited
  double r;
  double millions;
};

inline constexpr std::array<double, 4> kTrainingR{0.005, 0.01, 0.03, 0.05};

// Training-sample lower bounds, S = 6.14e6.
inline const std::array<TrainingRow, 16> kTraining{{
    {0.99, 2000, 0.005, 3.87}, {0.99, 2000, 0.01, 3.58},
    {0.99, 2000, 0.03, 2.69},  {0.99, 2000, 0.05, 2.09},
    {0.95, 2000, 0.005, 1.67}, {0.95, 2000, 0.01, 1.59},
    {0.95, 2000, 0.03, 1.31},  {0.95, 2000, 0.05, 1.10},
    {0.99, std::nullopt, 0.005, 3.73}, {0.99, std::nullopt, 0.01, 3.46},
    {0.99, std::nullopt, 0.03, 2.61},  {0.99, std::nullopt, 0.05, 2.04},
    {0.95, std::nullopt, 0.005, 1.65}, {0.95, std::nullopt, 0.01, 1.57},
    {0.95, std::nullopt, 0.03, 1.29},  {0.95, std::nullopt, 0.05, 1.08},
}};
inline constexpr double kTrainingSupport = 6.14e6;
inline constexpr double kTrainingFactor = 3.0;

inline constexpr std::uint64_t kOptimisticCardinality = 6'144'000;
inline constexpr double kRealisticCardinality = 1.2e47;

inline constexpr std::uint64_t kOracleSamples = 540;
inline constexpr std::uint64_t kTestsAtOnePercent = 300;
inline constexpr std::uint64_t kElectorateBmds = 47;
inline constexpr std::uint64_t kElectorateVoters = 6580;

}  // namespace bmdlimits::reference
