#pragma once

#include <cmath>
#include <string>

#include "stagpoint/functionals.hpp"

namespace stagpoint {

// Polyline of samples against log10 r. A finite reference draws a dashed horizontal line.
std::string svg_log_plot(const std::string& title, const std::string& ylabel, const Samples& samples,
                         double reference = std::nan(""));

}  // namespace stagpoint
