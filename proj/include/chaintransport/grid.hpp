#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chaintransport {

enum class GridScale { linear, log, symlog, values };

struct Grid {
    GridScale scale = GridScale::values;
    std::string text;            // canonical grid string, parses back to the same values
    std::vector<double> values;  // strictly increasing
};

std::vector<double> linspace(double first, double last, int count);
/// count log-spaced points from first to last, both > 0.
std::vector<double> logspace(double first, double last, int count);
/// Symmetric grid: log-spaced magnitudes in (linthresh, max] on each side and
/// a linear window of lin_count points on [-linthresh, linthresh].
std::vector<double> symlogspace(double max, double linthresh, int log_count, int lin_count);

/// "lin:a,b,n" | "log:a,b,n" | "symlog:max,linthresh,nlog,nlin" | "values:v1,v2,..."
Grid parse_grid(std::string_view text);

const char* to_string(GridScale scale);

} // namespace chaintransport
