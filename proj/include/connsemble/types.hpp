#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string_view>

namespace connsemble {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Feature perspective of a connectome. `fused` is the concatenation W|S|C.
enum class Measure { weights, shortest_path, communicability, fused };

inline constexpr std::array<Measure, 3> kNetworkMeasures = {
    Measure::weights, Measure::shortest_path, Measure::communicability};

std::string_view to_string(Measure m) noexcept;
Measure measure_from_string(std::string_view name);

/// Diagnostic label. MCI is the positive class.
enum class Diagnosis : int { hc = 0, mci = 1 };

}  // namespace connsemble
