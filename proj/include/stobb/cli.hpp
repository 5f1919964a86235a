#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "stobb/attribution.hpp"
#include "stobb/diagnostics.hpp"
#include "stobb/docgen.hpp"
#include "stobb/engine.hpp"
#include "stobb/interfaces.hpp"
#include "stobb/oracle.hpp"

namespace stobb::cli {

struct RunConfig {
    std::string state_path;
    std::string weights_path;
    std::string lookup_path;
    std::string data_path;
    std::string attributions_path;  // fixed attribution vectors, row-aligned with data
    std::string out_prefix;
    std::string query_x;            // comma-separated feature values
    std::uint64_t seed = 0;
    std::size_t initial_k = 3;
    double bandwidth = 0;           // 0: default 0.75*sqrt(d)
    std::size_t n_perturbations = 5000;
    double ridge = 1e-3;
    int target_class = -1;          // contrastive filter, -1: none
    bool dedup = false;
    bool full_snapshots = false;
};

inline void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for " + path + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Guards the state path against concurrent mutating invocations. Read-only
// commands do not take it.
class LockFile {
  public:
    explicit LockFile(const std::string& state_path) : path_(state_path + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw IoError("state is locked by another process (lock file " + path_ + " exists)");
    }
    ~LockFile() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

  private:
    std::string path_;
    int fd_ = -1;
};

inline Vector parse_vector(const std::string& s) {
    Vector out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_double(cell));
    return out;
}

// Headerless CSV, one feature row per line. Row numbers in errors are 1-based.
inline std::vector<Vector> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Vector> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            rows.push_back(parse_vector(line));
        } catch (const IoError& e) {
            throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw IoError(path + ":" + std::to_string(lineno) + ": inconsistent row width");
    }
    return rows;
}

inline std::unique_ptr<BlackBoxModel> load_oracle(const RunConfig& cfg) {
    if (cfg.weights_path.empty() == cfg.lookup_path.empty())
        throw IoError("exactly one of --weights and --lookup must be given");
    if (!cfg.weights_path.empty())
        return std::make_unique<NetworkModel>(NetworkModel::load(cfg.weights_path));
    return std::make_unique<LookupModel>(LookupModel::load(cfg.lookup_path));
}

inline std::unique_ptr<Attributor> make_attributor(const RunConfig& cfg,
                                                   const ExplainerConfig& ecfg,
                                                   const std::vector<Vector>& data_rows) {
    if (cfg.attributions_path.empty()) return std::make_unique<LimeAttributor>(ecfg);
    std::vector<Vector> attr_rows = read_rows(cfg.attributions_path);
    if (attr_rows.size() != data_rows.size())
        throw IoError("--attributions row count does not match --data");
    auto fixed = std::make_unique<FixedAttributor>();
    for (std::size_t i = 0; i < data_rows.size(); ++i)
        fixed->insert(data_rows[i], attr_rows[i]);
    return fixed;
}

inline Stobb load_state(const RunConfig& cfg) {
    return Stobb::deserialize(read_file(cfg.state_path));
}

inline void save_state(const RunConfig& cfg, const Stobb& state) {
    atomic_write(cfg.state_path, state.serialize());
}

inline std::string out_path(const RunConfig& cfg, const std::string& suffix) {
    std::string prefix = cfg.out_prefix.empty() ? cfg.state_path : cfg.out_prefix;
    return prefix + suffix;
}

inline void print_report(std::ostream& os, const Stobb& state) {
    DiagnosticsPoint d = state.sample_diagnostics();
    os << "samples " << d.samples << " (rejected " << state.base().rejected_count() << ")\n"
       << "feature sets " << d.feature_sets << ", boxes " << d.boxes << " (singletons "
       << d.singletons << ")\n"
       << "updates " << d.updates << ", success rate " << format_double(d.success_rate) << "\n"
       << "compression " << format_double(d.compression) << "\n"
       << "k " << d.k << " (escalations " << state.k_history().size() << ")\n";
    for (const KHistoryEntry& e : state.k_history())
        os << "  k " << e.old_k << " -> " << e.old_k + 1 << " on conflict of observations "
           << e.conflict_new << " / " << e.conflict_old << " (snapshot " << e.snapshot_hash
           << ")\n";
}

inline int process_rows(Stobb& state, const BlackBoxModel& model, Attributor& phi,
                        const std::vector<Vector>& rows, std::ostream& os) {
    try {
        for (const Vector& x : rows) state.process(model, phi, x);
    } catch (const AmbiguousObservationSpace& e) {
        os << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int cmd_build(const RunConfig& cfg, std::ostream& os = std::cout) {
    LockFile lock(cfg.state_path);
    auto model = load_oracle(cfg);
    std::vector<Vector> rows = cfg.data_path.empty() ? std::vector<Vector>{}
                                                     : read_rows(cfg.data_path);

    ExplainerConfig ecfg;
    ecfg.n_perturbations = cfg.n_perturbations;
    ecfg.kernel_bandwidth = cfg.bandwidth;
    ecfg.ridge_strength = cfg.ridge;
    ecfg.seed = cfg.seed;
    // Standardization statistics are frozen from this ingestion corpus;
    // recomputing later would silently change attributions.
    ExplainerConfig::standardization_from(rows, ecfg.feature_means, ecfg.feature_stds);

    Stobb state(cfg.initial_k, ecfg, cfg.dedup, cfg.full_snapshots);
    auto phi = make_attributor(cfg, ecfg, rows);

    int rc = process_rows(state, *model, *phi, rows, os);
    save_state(cfg, state);
    export_diagnostics(state.diagnostics_series(), out_path(cfg, ".diagnostics.csv"),
                       out_path(cfg, ".diagnostics.svg"));
    print_report(os, state);
    if (rc == 0 && !state.check_adequacy().ok()) rc = 1;
    return rc;
}

inline int cmd_update(const RunConfig& cfg, std::ostream& os = std::cout) {
    LockFile lock(cfg.state_path);
    Stobb state = load_state(cfg);
    AdequacyReport pre = state.check_adequacy();
    if (!pre.ok()) {
        os << "refusing update: existing state is not adequate\n";
        for (const std::string& f : pre.failures) os << "  " << f << "\n";
        return 1;
    }
    auto model = load_oracle(cfg);
    std::vector<Vector> rows = read_rows(cfg.data_path);
    auto phi = make_attributor(cfg, state.explainer_config(), rows);

    int rc = process_rows(state, *model, *phi, rows, os);
    save_state(cfg, state);
    export_diagnostics(state.diagnostics_series(), out_path(cfg, ".diagnostics.csv"),
                       out_path(cfg, ".diagnostics.svg"));
    print_report(os, state);
    return rc;
}

inline void print_rule(std::ostream& os, const RuleExplanation& r) {
    os << "rule (box " << r.box_id << ", label " << r.label << ", support " << r.support_size
       << "):\n";
    for (const auto& c : r.conditions)
        os << "  " << format_double(c.lo) << " <= x[" << c.feature << "] <= "
           << format_double(c.hi) << "\n";
    os << "  provenance:";
    for (ObsId id : r.provenance) os << " " << id;
    os << "\n";
}

inline int cmd_query(const RunConfig& cfg, bool contrastive, std::ostream& os = std::cout) {
    LockFile lock(cfg.state_path);  // queries may mutate
    Stobb state = load_state(cfg);
    auto model = load_oracle(cfg);
    std::vector<Vector> data_rows =
        cfg.data_path.empty() ? std::vector<Vector>{} : read_rows(cfg.data_path);
    auto phi = make_attributor(cfg, state.explainer_config(), data_rows);
    Vector x = parse_vector(cfg.query_x);

    std::size_t events_before = state.update_log().size();
    try {
        if (!contrastive) {
            RuleExplanation r = explain_local(state, *model, *phi, x);
            print_rule(os, r);
        } else {
            std::optional<ClassId> target;
            if (cfg.target_class >= 0) target = cfg.target_class;
            ContrastPair pair = explain_contrastive(state, *model, *phi, x, target);
            print_rule(os, pair.rule);
            if (pair.contrast) {
                os << "contrast at distance " << format_double(pair.distance) << ":\n";
                print_rule(os, *pair.contrast);
            } else {
                os << "no contrast available (no other-label box in this boxsystem)\n";
            }
        }
    } catch (const AmbiguousObservationSpace& e) {
        save_state(cfg, state);
        os << "error: " << e.what() << "\n";
        return 2;
    }
    if (state.update_log().size() != events_before) save_state(cfg, state);
    return 0;
}

inline int cmd_global(const RunConfig& cfg, std::ostream& os = std::cout) {
    Stobb state = load_state(cfg);
    GlobalView view = export_global(state);
    render_scatter(view, out_path(cfg, ".global.svg"), out_path(cfg, ".global.csv"));
    os << view.points.size() << " points, " << view.subspace_table.size() << " subspaces\n";
    return 0;
}

inline int cmd_diag(const RunConfig& cfg, std::ostream& os = std::cout) {
    Stobb state = load_state(cfg);
    export_diagnostics(state.diagnostics_series(), out_path(cfg, ".diagnostics.csv"),
                       out_path(cfg, ".diagnostics.svg"));
    os << state.diagnostics_series().size() << " diagnostics points exported\n";
    return 0;
}

inline int cmd_doc(const RunConfig& cfg, std::ostream& os = std::cout) {
    Stobb state = load_state(cfg);
    DocSheet sheet = generate_docsheet(state, default_static_answers());
    atomic_write(out_path(cfg, ".doc.md"), docsheet_markdown(sheet));
    atomic_write(out_path(cfg, ".doc.json"), docsheet_json(sheet));
    os << "documentation sheet written (" << sheet.sections.size() << " questions)\n";
    return 0;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& os = std::cout) {
    Stobb state = load_state(cfg);
    AdequacyReport rep = state.check_adequacy();
    if (rep.ok()) {
        os << "adequate: " << state.base().size() << " observations, "
           << state.total_boxes() << " boxes\n";
        return 0;
    }
    os << rep.failures.size() << " failures:\n";
    for (const std::string& f : rep.failures) os << "  " << f << "\n";
    return 1;
}

}  // namespace stobb::cli
