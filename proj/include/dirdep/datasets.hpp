#pragma once

// Small real datasets shipped with the library, angles in degrees.

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"

namespace dirdep {

struct EmbeddedDataset {
  std::string_view name;
  std::string_view description;
  std::string_view x_name;
  std::string_view y_name;
  std::span<const double> x_degrees;
  std::span<const double> y_degrees;

  std::size_t size() const noexcept { return x_degrees.size(); }
  AngleVector x() const { return AngleVector::from_degrees(x_degrees); }
  AngleVector y() const { return AngleVector::from_degrees(y_degrees); }
};

namespace detail {

// Blood-pressure peak times, 10 patients, two treatment periods.
inline constexpr std::array<double, 10> kBloodPressureTheta = {30,  15,  11,  4,   348,
                                                               347, 341, 333, 332, 285};
inline constexpr std::array<double, 10> kBloodPressurePhi = {25,  5,   349, 358, 340,
                                                             347, 345, 331, 329, 287};

// Wind direction at 6 a.m. and 12 noon on 21 consecutive days.
inline constexpr std::array<double, 21> kWind6am = {356, 97.2, 211, 232, 343, 292,  157,
                                                    302, 335,  302, 324, 84.6, 324, 340,
                                                    157, 238,  254, 146, 232,  122, 329};
inline constexpr std::array<double, 21> kWind12pm = {119,  162, 221, 259, 270, 28.8, 97.2,
                                                     292,  39.6, 313, 94.2, 45,  47,  108,
                                                     221, 270, 119, 248, 270, 45,   23.4};

}  // namespace detail

inline const std::vector<EmbeddedDataset>& embedded_datasets() {
  static const std::vector<EmbeddedDataset> all = {
      {"bloodpressure", "peak blood-pressure times of 10 patients under two treatments",
       "theta_deg", "phi_deg", detail::kBloodPressureTheta, detail::kBloodPressurePhi},
      {"wind", "wind direction at 6 a.m. and 12 noon on 21 days", "am6_deg", "pm12_deg",
       detail::kWind6am, detail::kWind12pm},
  };
  return all;
}

inline constexpr std::string_view kSphereCsvSchema =
    "For spherical data supply a CSV file with one header row and d+1 coordinate columns per "
    "variable, one unit vector per row (e.g. x1,x2,x3,y1,y2,y3 for two directions on S^2), then "
    "run: dirdep test --data FILE --x-type sphere --y-type sphere "
    "[--x-cols x1,x2,x3 --y-cols y1,y2,y3] [--renormalize]";

inline const EmbeddedDataset& find_dataset(std::string_view name) {
  for (const auto& d : embedded_datasets()) {
    if (d.name == name) return d;
  }
  if (name == "rock") {
    throw InputError(
        "dataset 'rock' (paleomagnetic remanence directions) is not embedded because its values "
        "are not published with the method; obtain the specimen directions externally. " +
        std::string(kSphereCsvSchema));
  }
  std::string known;
  for (const auto& d : embedded_datasets()) known += (known.empty() ? "" : ", ") + std::string(d.name);
  throw InputError("unknown dataset '" + std::string(name) + "' (available: " + known + ")");
}

}  // namespace dirdep
