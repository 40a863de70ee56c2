#ifndef STYLOMETER_VERSION_HPP
#define STYLOMETER_VERSION_HPP

namespace stylometer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stylometer

#endif  // STYLOMETER_VERSION_HPP
