#pragma once

#include <string>
#include <vector>

namespace lyapflow {

// Outcome of one certified inequality over a set of samples.
// pass holds exactly when max_violation <= tolerance.
struct CertReport {
    std::string inequality_id;
    long samples_checked = 0;
    double max_violation = 0.0;
    double violation_location = 0.0;  // time of the worst sample
    double tolerance = 0.0;
    bool pass = false;
};

inline CertReport make_report(std::string id, long samples, double max_violation,
                              double location, double tolerance) {
    CertReport r;
    r.inequality_id = std::move(id);
    r.samples_checked = samples;
    r.max_violation = max_violation;
    r.violation_location = location;
    r.tolerance = tolerance;
    r.pass = max_violation <= tolerance;
    return r;
}

std::string to_json(const CertReport& report);
std::string to_json(const std::vector<CertReport>& reports);

// Summary table: inequality-id, pass, max-violation, location.
std::string to_csv(const std::vector<CertReport>& reports);

}  // namespace lyapflow
