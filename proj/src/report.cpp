#include <sstream>

#include "gibbs_lines/checks.hpp"

namespace gibbs_lines {

nlohmann::json CheckReport::to_json() const {
    return {{"name", name},
            {"params", params},
            {"trials", trials},
            {"worst_margin", worst_margin},
            {"tolerance", tolerance},
            {"pass", pass},
            {"threshold_provenance", threshold_provenance},
            {"details", details}};
}

std::string CheckReport::to_text() const {
    std::ostringstream os;
    os << (pass ? "[PASS] " : "[FAIL] ") << name << "  trials=" << trials
       << "  worst_margin=" << worst_margin << "  tolerance=" << tolerance << "\n"
       << "       thresholds: " << threshold_provenance << "\n";
    if (!details.is_null()) os << "       details: " << details.dump() << "\n";
    return os.str();
}

} // namespace gibbs_lines
