#include "lyapflow/report.hpp"

#include <cstdio>
#include <sstream>

namespace lyapflow {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_json(const CertReport& r) {
    std::ostringstream os;
    os << "{\"inequality-id\":\"" << r.inequality_id << "\""
       << ",\"samples-checked\":" << r.samples_checked
       << ",\"max-violation\":" << fmt(r.max_violation)
       << ",\"violation-location\":" << fmt(r.violation_location)
       << ",\"tolerance\":" << fmt(r.tolerance)
       << ",\"pass\":" << (r.pass ? "true" : "false") << "}";
    return os.str();
}

std::string to_json(const std::vector<CertReport>& reports) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) os << ",";
        os << to_json(reports[i]);
    }
    os << "]";
    return os.str();
}

std::string to_csv(const std::vector<CertReport>& reports) {
    std::ostringstream os;
    os << "inequality-id,pass,max-violation,location\n";
    for (const auto& r : reports)
        os << r.inequality_id << ',' << (r.pass ? "true" : "false") << ','
           << fmt(r.max_violation) << ',' << fmt(r.violation_location) << '\n';
    return os.str();
}

}  // namespace lyapflow
