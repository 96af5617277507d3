#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clusterflip/oracle.hpp"
#include "clusterflip/verdict.hpp"

namespace clusterflip {

inline nlohmann::ordered_json verdict_to_json(const TestVerdict& v) {
    nlohmann::ordered_json j;
    j["name"] = v.name;
    j["claim"] = v.claim;
    j["estimate"] = v.estimate;
    j["se"] = v.std_error;
    j["target"] = v.target;
    j["relation"] = relation_name(v.relation);
    j["z"] = v.z;
    j["pass"] = v.pass;
    j["inconclusive"] = v.inconclusive;
    j["vacuous"] = v.vacuous;
    j["note"] = v.note;
    j["n_samples"] = v.n_samples;
    j["seed"] = v.seed;
    return j;
}

// verdicts.json is byte-identical for identical config and seed; the wall
// clock is isolated in the single generated_at key.
inline void write_verdicts_json(const std::string& path, const std::vector<TestVerdict>& verdicts,
                                std::uint64_t seed) {
    nlohmann::ordered_json root;
    root["seed"] = seed;
    root["n_checks"] = verdicts.size();
    root["all_pass"] = all_pass(verdicts);
    root["any_inconclusive"] = any_inconclusive(verdicts);
    root["generated_at"] = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    root["checks"] = nlohmann::ordered_json::array();
    for (const auto& v : verdicts) root["checks"].push_back(verdict_to_json(v));
    std::ofstream out(path);
    out << root.dump(2) << "\n";
}

inline std::string verdict_status(const TestVerdict& v) {
    if (v.pass) return v.vacuous ? "PASS (vacuous)" : "PASS";
    if (v.inconclusive) return "INCONCLUSIVE";
    return "FAIL";
}

inline void write_summary(std::ostream& out, const std::vector<TestVerdict>& verdicts) {
    out << std::left << std::setw(44) << "check" << std::setw(14) << "estimate" << std::setw(12)
        << "se" << std::setw(14) << "target" << std::setw(4) << "rel" << std::setw(10) << "z"
        << "status\n";
    for (const auto& v : verdicts) {
        std::ostringstream est, se, target, z;
        est << std::setprecision(6) << v.estimate;
        se << std::setprecision(3) << v.std_error;
        target << std::setprecision(6) << v.target;
        z << std::setprecision(3) << v.z;
        out << std::left << std::setw(44) << v.name << std::setw(14) << est.str() << std::setw(12)
            << se.str() << std::setw(14) << target.str() << std::setw(4)
            << relation_name(v.relation) << std::setw(10) << z.str() << verdict_status(v) << "\n";
    }
    std::size_t passed = 0, inconclusive = 0, failed = 0;
    for (const auto& v : verdicts) {
        if (v.pass) ++passed;
        else if (v.inconclusive) ++inconclusive;
        else ++failed;
    }
    out << "\n" << passed << " passed, " << inconclusive << " inconclusive, " << failed
        << " failed (" << verdicts.size() << " checks)\n";
}

inline void write_summary_file(const std::string& path, const std::vector<TestVerdict>& verdicts) {
    std::ofstream out(path);
    write_summary(out, verdicts);
}

// samples.csv: one row per retained sample with the requested observables.
inline void write_samples_csv(const std::string& path, const std::vector<std::string>& columns,
                              const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    out << "step,replica";
    for (const auto& c : columns) out << "," << c;
    out << "\n";
    out << std::setprecision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            if (i < 2) out << static_cast<std::uint64_t>(row[i]);
            else out << row[i];
        }
        out << "\n";
    }
}

// Exact-law table: one row per configuration, state labels then probability.
inline void write_law_csv(const std::string& path, const ExactLaw& law) {
    std::ofstream out(path);
    for (std::uint32_t v = 0; v < law.n_vertices; ++v) out << "v" << v << ",";
    out << "probability\n";
    out << std::setprecision(17);
    for (std::uint64_t idx = 0; idx < law.size(); ++idx) {
        const DiscreteConfig cfg = law.decode(idx);
        for (int s : cfg) out << s << ",";
        out << law.prob[idx] << "\n";
    }
}

inline void write_joint_csv(const std::string& path, const JointLaw& joint) {
    std::ofstream out(path);
    for (std::uint32_t v = 0; v < joint.n_vertices; ++v) out << "v" << v << ",";
    for (std::uint32_t e = 0; e < joint.n_edges; ++e) out << "w" << e << ",";
    out << "probability\n";
    out << std::setprecision(17);
    ExactLaw codec;
    codec.n_states = joint.n_states;
    codec.n_vertices = joint.n_vertices;
    const std::uint64_t words = joint.bond_words();
    for (std::uint64_t c = 0; c < joint.prob.size() / words; ++c) {
        const DiscreteConfig cfg = codec.decode(c);
        for (std::uint64_t b = 0; b < words; ++b) {
            for (int s : cfg) out << s << ",";
            for (std::uint32_t e = 0; e < joint.n_edges; ++e) out << ((b >> e) & 1u) << ",";
            out << joint.prob[c * words + b] << "\n";
        }
    }
}

}  // namespace clusterflip
