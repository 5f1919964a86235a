#pragma once

#include <chrono>
#include <ctime>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "stobb/diagnostics.hpp"
#include "stobb/engine.hpp"

namespace stobb {

struct DocGenError : std::runtime_error {
    DocGenError(std::string msg, std::vector<std::string> gaps_)
        : std::runtime_error(std::move(msg)), gaps(std::move(gaps_)) {}
    std::vector<std::string> gaps;
};

struct DocSheet {
    struct Entry {
        std::string category;
        std::string question;
        std::string answer;
    };
    std::vector<Entry> sections;
    std::string generated_at;
    std::string state_hash;
};

namespace docgen {

struct Question {
    const char* category;
    const char* text;
    bool dynamic;  // answered from live state; everything else needs a static answer
};

// The full documentation question sheet, six categories.
inline const std::vector<Question>& questions() {
    static const std::vector<Question> qs = {
        {"Observations",
         "What variables, auxiliary measures and target outputs constitute the observation space?",
         false},
        {"Observations", "How are auxiliary measures of the black-box behaviour obtained?", false},
        {"Observations", "What quality criteria apply to these measurements?", false},
        {"Observations", "How is the observation base stored?", true},
        {"Hypothesis Class",
         "What interpretable model family defines the surrogate's relational structure?", false},
        {"Hypothesis Class", "How does the surrogate process an observation step by step?", false},
        {"Hypothesis Class",
         "Under which conditions is an observation not covered by the surrogate?", false},
        {"Hypothesis Class",
         "Which user-centred criteria or pragmatic virtues shaped the design?", false},
        {"Algorithmic Components",
         "How is the surrogate initially constructed from the observation base?", false},
        {"Algorithmic Components", "How does the surrogate demonstrate empirical adequacy?", true},
        {"Algorithmic Components", "How is the surrogate stored?", true},
        {"Algorithmic Components", "What is the update policy when new observations appear?", true},
        {"Algorithmic Components", "Does the algorithm represent the full hypothesis class?", false},
        {"Algorithmic Components", "How are trade-offs or approximations documented?", false},
        {"Operational Requirements",
         "What resources or runtime requirements must be met to deploy and maintain the SToBB?",
         false},
        {"Operational Requirements",
         "Does access to parts of the SToBB have to be restricted for specific users or "
         "interfaces?",
         false},
        {"Operational Requirements", "How are updates to the SToBB performed?", true},
        {"Operational Requirements", "How are updates to the SToBB recorded?", true},
        {"Diagnostics",
         "Which diagnostic metrics are monitored during construction and updates?", true},
        {"Diagnostics", "How frequently are diagnostics evaluated and recorded?", false},
        {"Diagnostics", "How are diagnostic records stored and made accessible?", false},
        {"Interfaces", "What interfaces are implemented and what questions do they answer?", false},
        {"Interfaces", "Who is the target audience of the interface?", false},
        {"Interfaces", "What is the purpose, method, and assumption of each interface?", false},
        {"Interfaces", "How can external parties audit or replicate the analyses?", false},
    };
    return qs;
}

inline std::string dynamic_answer(const Question& q, const Stobb& state) {
    const std::string question(q.text);
    DiagnosticsPoint d = state.sample_diagnostics();
    const ExplainerConfig& cfg = state.explainer_config();
    if (question == "How is the observation base stored?") {
        return "As an append-only list inside the versioned JSON state file, one record per "
               "line in the form id;x;label;attribution;subspace with full-precision decimals. "
               "Currently " +
               std::to_string(state.base().size()) + " records are stored and " +
               std::to_string(state.base().rejected_count()) +
               " probes were rejected for lacking any strictly positive attribution score.";
    }
    if (question == "How does the surrogate demonstrate empirical adequacy?") {
        return "Every stored observation is re-traced through its boxsystem (the `check` "
               "command); the run is adequate iff the failure list is empty. The current state "
               "covers " +
               std::to_string(d.samples) + " observations with " + std::to_string(d.boxes) +
               " boxes across " + std::to_string(d.feature_sets) +
               " subspaces (compression " + format_double(d.compression) + ").";
    }
    if (question == "How is the surrogate stored?") {
        return "In the same versioned JSON state file as the observation base: every boxsystem "
               "with its subspace, boxes (intervals, label, supporting observation ids), the "
               "update log, k history with content-hashed snapshots, and the explainer "
               "configuration (seed " +
               std::to_string(cfg.seed) + ", " + std::to_string(cfg.n_perturbations) +
               " perturbations, ridge " + format_double(cfg.ridge_strength) +
               "). Writes are atomic (temp file + rename).";
    }
    if (question == "What is the update policy when new observations appear?") {
        return "Each observation is predicted, attributed, binarized to its top-k positive "
               "dimensions (current k = " +
               std::to_string(state.k()) +
               "), and recorded. If tracing fails, the engine creates a boxsystem, expands or "
               "adds a box, or dissolves a mislabeled box into singletons and re-merges. Two "
               "same-subspace observations with identical projections but different labels "
               "escalate k by one and rebuild from the stored base (" +
               std::to_string(state.k_history().size()) + " escalations so far).";
    }
    if (question == "How are updates to the SToBB performed?") {
        return "Exclusively through the single-writer engine: the `build` and `update` commands "
               "and the local/contrastive queries, which route novel inputs through the same "
               "update procedure. A lock file guards the state path against concurrent writers; "
               "the global view is read-only and cannot trigger updates.";
    }
    if (question == "How are updates to the SToBB recorded?") {
        return "In an append-only update log (one event per processed observation with its "
               "branch and box counts; " +
               std::to_string(state.update_log().size()) +
               " events so far) and, for k escalations, in the k history together with a "
               "content-hashed snapshot of the pre-escalation state.";
    }
    if (question == "Which diagnostic metrics are monitored during construction and updates?") {
        return "Per processed sample: samples, feature sets, boxes, singletons, cumulative "
               "updates, k, compression (1 - boxes/samples) and success rate (fraction of "
               "samples that did not trigger an update). Latest point: " +
               std::to_string(d.samples) + " samples, " + std::to_string(d.updates) +
               " updates, success rate " + format_double(d.success_rate) + ".";
    }
    throw std::logic_error("no dynamic answer for question: " + question);
}

}  // namespace docgen

// Prose answers for the questions that cannot be derived from state. Shipped
// with the engine; callers may override or extend.
inline std::map<std::string, std::string> default_static_answers() {
    return {
        {"What variables, auxiliary measures and target outputs constitute the observation "
         "space?",
         "The classifier's real-valued input feature vector, the class label it predicts, and "
         "an attribution vector over the input dimensions as auxiliary measure. The attribution "
         "constrains the surrogate to the subspaces the classifier relied on for its decision."},
        {"How are auxiliary measures of the black-box behaviour obtained?",
         "By a perturbation-based linear attributor: Gaussian perturbations around the "
         "standardized query point, exponential kernel weights, and a weighted ridge regression "
         "of the one-vs-rest indicator of the predicted class. Seed and all parameters are "
         "recorded in the state file so the attribution is exactly replayable."},
        {"What quality criteria apply to these measurements?",
         "Observations whose attribution has no strictly positive component are rejected and "
         "only counted. Attribution is deterministic given the input and the recorded seed; "
         "stored attribution vectors are never recomputed, so rebuilds are reproducible."},
        {"What interpretable model family defines the surrogate's relational structure?",
         "Rule-based: for each encountered feature subspace, one boxsystem of non-overlapping, "
         "axis-aligned, fully bounded, class-labeled boxes. Each box reads directly as a rule "
         "(per-dimension closed intervals implying a class)."},
        {"How does the surrogate process an observation step by step?",
         "Predict the class, compute the attribution, select the top-k positive dimensions as "
         "subspace, then trace: look up the boxsystem for that subspace and search for a box "
         "that contains the projected point with a matching label. Tracing failure triggers the "
         "documented update procedure."},
        {"Under which conditions is an observation not covered by the surrogate?",
         "When its subspace has no boxsystem yet, when no box of the matching boxsystem "
         "contains its projection, or when the containing box carries a different label. "
         "Observations without positive attribution scores are rejected outright."},
        {"Which user-centred criteria or pragmatic virtues shaped the design?",
         "Rule length is capped by k (initially 3), trading expressivity for short, readable "
         "rules; the engine escalates k only when adequacy demands it. Boxes never extend "
         "beyond observed values, so every rule boundary is backed by data."},
        {"How is the surrogate initially constructed from the observation base?",
         "Online, starting from an empty set of boxsystems: observations are processed one at a "
         "time in file order through the same update procedure used for maintenance, so "
         "construction and update are a single code path."},
        {"Does the algorithm represent the full hypothesis class?",
         "No. The greedy merge is order-dependent and only explores hulls of closest same-label "
         "pairs, so some adequate box configurations are never produced. Every produced "
         "configuration, however, is adequate and non-overlapping."},
        {"How are trade-offs or approximations documented?",
         "In the project README (file formats, metric and tie-breaking choices, deviation from "
         "the reference attribution package) and in this sheet; numeric behaviour is captured "
         "by the diagnostics series shipped next to every state file."},
        {"What resources or runtime requirements must be met to deploy and maintain the SToBB?",
         "A single desk-scale machine. The engine is a self-contained command-line tool; the "
         "dominant cost is the attributor's perturbation predictions (thousands of black-box "
         "forward passes per observation). No GPU or network access is required."},
        {"Does access to parts of the SToBB have to be restricted for specific users or "
         "interfaces?",
         "Only writes: all mutating commands serialize through one writer guarded by a lock "
         "file. The state file is a plain document readable by anyone with file access; "
         "read-only commands operate on the last complete state."},
        {"How frequently are diagnostics evaluated and recorded?",
         "After every processed (non-rejected) observation one point is appended to the series; "
         "rejected probes are excluded from the ratios and reported as a separate counter."},
        {"How are diagnostic records stored and made accessible?",
         "Inside the state file as part of the serialized series, and exported on demand by the "
         "`diag` command as a CSV (columns samples, feature_sets, boxes, singletons, updates, "
         "k, compression, success_rate) plus an SVG chart."},
        {"What interfaces are implemented and what questions do they answer?",
         "Local (why this prediction: the applicable rule), contrastive (what nearest "
         "other-label rule the input is closest to, optionally targeted at a class), and a "
         "read-only global 2-D projection of all observations keyed by subspace and class."},
        {"Who is the target audience of the interface?",
         "Local and contrastive answers target operators and affected users reasoning about "
         "individual decisions; the global view targets developers and auditors inspecting "
         "behaviour over the whole observed input space."},
        {"What is the purpose, method, and assumption of each interface?",
         "Local/contrastive extract boxes from the maintained surrogate and may route novel "
         "inputs through the update procedure first; they assume the black box is reachable "
         "for prediction and attribution. The global view projects stored inputs with a "
         "deterministic principal-component projection and assumes nothing beyond a populated "
         "base."},
        {"How can external parties audit or replicate the analyses?",
         "The state file carries the full observation base, explainer seed and parameters, "
         "update log, and content-hashed snapshots; rebuilding from the same data and "
         "configuration is byte-identical. The `check` command re-verifies adequacy of any "
         "state file independently."},
    };
}

// Assembles the documentation sheet: dynamic answers from live state, prose
// answers from static_answers. Missing prose answers fail generation with the
// list of gaps.
inline DocSheet generate_docsheet(const Stobb& state,
                                  const std::map<std::string, std::string>& static_answers) {
    std::vector<std::string> gaps;
    DocSheet sheet;
    for (const docgen::Question& q : docgen::questions()) {
        DocSheet::Entry e;
        e.category = q.category;
        e.question = q.text;
        if (q.dynamic) {
            e.answer = docgen::dynamic_answer(q, state);
        } else {
            auto it = static_answers.find(q.text);
            if (it == static_answers.end()) {
                gaps.push_back(q.text);
                continue;
            }
            e.answer = it->second;
        }
        sheet.sections.push_back(std::move(e));
    }
    if (!gaps.empty()) {
        std::string msg = "documentation sheet incomplete; missing static answers for:";
        for (const std::string& g : gaps) msg += "\n  - " + g;
        throw DocGenError(msg, gaps);
    }
    sheet.state_hash = state.state_hash();
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    sheet.generated_at = buf;
    return sheet;
}

inline std::string docsheet_markdown(const DocSheet& sheet) {
    std::string out = "# Documentation Question Sheet\n\n";
    out += "generated_at: " + sheet.generated_at + "\n";
    out += "state_hash: " + sheet.state_hash + "\n";
    std::string category;
    for (const DocSheet::Entry& e : sheet.sections) {
        if (e.category != category) {
            category = e.category;
            out += "\n## " + category + "\n";
        }
        out += "\n**" + e.question + "**\n\n" + e.answer + "\n";
    }
    return out;
}

inline std::string docsheet_json(const DocSheet& sheet) {
    nlohmann::json j;
    j["generated_at"] = sheet.generated_at;
    j["state_hash"] = sheet.state_hash;
    nlohmann::json sections = nlohmann::json::array();
    for (const DocSheet::Entry& e : sheet.sections)
        sections.push_back({{"category", e.category}, {"question", e.question},
                            {"answer", e.answer}});
    j["sections"] = sections;
    return j.dump(2) + "\n";
}

}  // namespace stobb
