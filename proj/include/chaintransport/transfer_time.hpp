#pragma once

#include <string>

namespace chaintransport {

enum class TransferMethod { nonhermitian_spectral, liouville_spectral, integration };

inline const char* to_string(TransferMethod m) {
    switch (m) {
        case TransferMethod::nonhermitian_spectral: return "nonhermitian_spectral";
        case TransferMethod::liouville_spectral: return "liouville_spectral";
        case TransferMethod::integration: return "integration";
    }
    return "unknown";
}

// Average arrival time at the sink, in units of hbar/Omega.
struct TransferTime {
    double value = 0.0;
    TransferMethod method = TransferMethod::liouville_spectral;
    double error_estimate = 0.0;  // absolute; 0 for spectral routes
    bool converged = true;
};

} // namespace chaintransport
