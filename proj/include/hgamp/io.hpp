#pragma once

#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "model.hpp"

namespace hgamp {

namespace detail {

inline std::string strfmt(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

/// Doubles printed so that parsing them back restores the exact value.
inline std::string lossless(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Token {
    std::string text;
    int line;
};

/// Whitespace-separated tokens with '#' line comments stripped.
class TokenStream {
public:
    TokenStream(std::istream& in, std::string source) : source_(std::move(source)) {
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens_.push_back({tok, lineno});
        }
    }

    bool eof() const { return pos_ >= tokens_.size(); }
    int line() const { return eof() ? last_line() : tokens_[pos_].line; }

    const Token& peek() const {
        if (eof()) fail(ErrorKind::Parse, source_ + ": unexpected end of file (line " +
                                              std::to_string(last_line()) + ")");
        return tokens_[pos_];
    }

    std::string next(const std::string& what) {
        if (eof())
            fail(ErrorKind::Parse, source_ + ": unexpected end of file, expected " + what +
                                       " (line " + std::to_string(last_line()) + ")");
        return tokens_[pos_++].text;
    }

    double number(const std::string& what) {
        const int at = line();
        const std::string tok = next(what);
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail(ErrorKind::Parse, source_ + ":" + std::to_string(at) + ": expected " + what +
                                       ", got \"" + tok + "\"");
        return v;
    }

    long integer(const std::string& what) {
        const int at = line();
        const double v = number(what);
        const auto r = static_cast<long>(v);
        if (static_cast<double>(r) != v)
            fail(ErrorKind::Parse,
                 source_ + ":" + std::to_string(at) + ": expected integer " + what);
        return r;
    }

    const std::string& source() const { return source_; }

private:
    int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }
    std::vector<Token> tokens_;
    std::string source_;
    std::size_t pos_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open file: " + path);
    return in;
}

inline std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (auto dot = base.find_last_of('.'); dot != std::string::npos && dot > 0)
        base.erase(dot);
    return base;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Canonical instance format (see docs/canonical-format.md)
// ---------------------------------------------------------------------------

inline Instance parse_canonical_instance(std::istream& in, const std::string& source,
                                         const std::string& name_hint) {
    detail::TokenStream ts(in, source);
    if (ts.next("magic 'CLRP'") != "CLRP")
        fail(ErrorKind::Parse, source + ": not a canonical instance, missing 'CLRP' header");
    if (ts.integer("format version") != 1)
        fail(ErrorKind::Parse, source + ": unsupported format version");

    const long n = ts.integer("customer count n");
    const long m = ts.integer("depot count m");
    const double Q = ts.number("vehicle capacity Q");
    const double F = ts.number("vehicle fixed cost F");
    const std::string conv = ts.next("distance convention");

    Rounding rounding = Rounding::ExactReal;
    double factor = 1.0;
    if (conv == "real") {
        rounding = Rounding::ExactReal;
    } else if (conv.rfind("int:", 0) == 0) {
        rounding = Rounding::ScaledInteger;
        try {
            factor = std::stod(conv.substr(4));
        } catch (const std::exception&) {
            factor = 0;
        }
        if (factor <= 0) fail(ErrorKind::Parse, source + ": bad scale in convention \"" + conv + "\"");
    } else {
        fail(ErrorKind::Parse, source + ": unknown distance convention \"" + conv +
                                   "\" (want real or int:<factor>)");
    }
    if (n < 1) fail(ErrorKind::Parse, source + ": customer count must be >= 1");
    if (m < 1) fail(ErrorKind::Parse, source + ": depot count must be >= 1");

    std::vector<DepotSpec> depots(m);
    for (long i = 0; i < m; ++i) {
        DepotSpec d;
        Point p;
        p.x = ts.number("depot x");
        p.y = ts.number("depot y");
        d.capacity = ts.number("depot capacity w");
        d.opening_cost = ts.number("depot opening cost o");
        d.pos = p;
        depots[i] = d;
    }
    std::vector<CustomerSpec> customers(n);
    for (long j = 0; j < n; ++j) {
        CustomerSpec c;
        Point p;
        p.x = ts.number("customer x");
        p.y = ts.number("customer y");
        c.demand = ts.number("customer demand d");
        c.pos = p;
        customers[j] = c;
    }

    const std::string name = name_hint.empty() ? detail::stem_of(source) : name_hint;

    if (!ts.eof() && ts.peek().text == "MATRIX") {
        ts.next("MATRIX");
        const long V = m + n;
        std::vector<Cost> matrix(static_cast<std::size_t>(V) * V);
        for (long u = 0; u < V; ++u)
            for (long v = 0; v < V; ++v)
                matrix[static_cast<std::size_t>(u) * V + v] = ts.number("matrix entry");
        return Instance::from_matrix(name, std::move(depots), std::move(customers), Q, F,
                                     std::move(matrix), rounding, factor);
    }
    if (!ts.eof())
        fail(ErrorKind::Parse, source + ":" + std::to_string(ts.line()) +
                                   ": unexpected trailing token \"" + ts.peek().text + "\"");
    return Instance::from_coords(name, std::move(depots), std::move(customers), Q, F, rounding,
                                 factor);
}

inline std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "CLRP 1\n";
    const std::string conv = inst.rounding == Rounding::ExactReal
                                 ? "real"
                                 : "int:" + detail::lossless(inst.scale_factor);
    out << inst.num_customers() << ' ' << inst.num_depots() << ' '
        << detail::lossless(inst.vehicle_capacity) << ' '
        << detail::lossless(inst.vehicle_fixed_cost) << ' ' << conv << '\n';
    for (const auto& d : inst.depots) {
        const Point p = d.pos.value_or(Point{0, 0});
        out << detail::lossless(p.x) << ' ' << detail::lossless(p.y) << ' '
            << detail::lossless(d.capacity) << ' ' << detail::lossless(d.opening_cost) << '\n';
    }
    for (const auto& c : inst.customers) {
        const Point p = c.pos.value_or(Point{0, 0});
        out << detail::lossless(p.x) << ' ' << detail::lossless(p.y) << ' '
            << detail::lossless(c.demand) << '\n';
    }
    if (inst.has_explicit_matrix()) {
        out << "MATRIX\n";
        const int V = inst.num_vertices();
        for (int u = 0; u < V; ++u) {
            for (int v = 0; v < V; ++v) {
                if (v) out << ' ';
                out << detail::lossless(inst.dist(u, v));
            }
            out << '\n';
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Prins-family adapter (see docs/prins-format.md). Distances: Euclidean x100,
// rounded up.
// ---------------------------------------------------------------------------

inline Instance parse_prins_instance(std::istream& in, const std::string& source,
                                     const std::string& name_hint) {
    detail::TokenStream ts(in, source);
    const long n = ts.integer("customer count");
    const long m = ts.integer("depot count");
    if (n < 1 || m < 1 || n > 100000 || m > 100000)
        fail(ErrorKind::Parse, source + ": implausible counts for this family");
    std::vector<DepotSpec> depots(m);
    std::vector<CustomerSpec> customers(n);
    for (long i = 0; i < m; ++i) {
        Point p;
        p.x = ts.number("depot x");
        p.y = ts.number("depot y");
        depots[i].pos = p;
    }
    for (long j = 0; j < n; ++j) {
        Point p;
        p.x = ts.number("customer x");
        p.y = ts.number("customer y");
        customers[j].pos = p;
    }
    const double Q = ts.number("vehicle capacity");
    for (long i = 0; i < m; ++i) depots[i].capacity = ts.number("depot capacity");
    for (long j = 0; j < n; ++j) customers[j].demand = ts.number("customer demand");
    for (long i = 0; i < m; ++i) depots[i].opening_cost = ts.number("depot opening cost");
    const double F = ts.number("route opening cost");
    if (!ts.eof()) ts.integer("trailing type flag"); // recorded in the files, not needed here
    if (!ts.eof())
        fail(ErrorKind::Parse, source + ":" + std::to_string(ts.line()) + ": unexpected trailing data");
    const std::string name = name_hint.empty() ? detail::stem_of(source) : name_hint;
    return Instance::from_coords(name, std::move(depots), std::move(customers), Q, F,
                                 Rounding::ScaledInteger, 100.0);
}

/// Parse an instance file. `format` is one of "canonical", "prins", "auto".
inline Instance parse_instance(const std::string& path, const std::string& format = "auto") {
    auto in = detail::open_input(path);
    if (format == "canonical") return parse_canonical_instance(in, path, "");
    if (format == "prins") return parse_prins_instance(in, path, "");
    if (format != "auto") fail(ErrorKind::Parse, "unknown instance format: " + format);
    // Auto: canonical files start with the CLRP magic; the Prins family files
    // start with the customer count.
    std::string first;
    in >> first;
    in.clear();
    in.seekg(0);
    if (first == "CLRP") return parse_canonical_instance(in, path, "");
    return parse_prins_instance(in, path, "");
}

// ---------------------------------------------------------------------------
// Solution files (JSON)
// ---------------------------------------------------------------------------

inline nlohmann::json solution_to_json(const Solution& sol, const Instance& inst) {
    nlohmann::json j;
    j["instance"] = inst.name;
    j["objective"] = sol.objective;
    nlohmann::json depots = nlohmann::json::array();
    DepotConfiguration cfg = config_of(sol, inst);
    for (int d : cfg.open) depots.push_back(d);
    j["depots"] = std::move(depots);
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& r : sol.routes) {
        nlohmann::json jr;
        jr["depot"] = r.depot;
        jr["customers"] = r.customers;
        routes.push_back(std::move(jr));
    }
    j["routes"] = std::move(routes);
    return j;
}

inline void write_solution(const Solution& sol, const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Parse, "cannot write file: " + path);
    out << solution_to_json(sol, inst).dump(2) << '\n';
}

/// Load a solution and validate it against the instance: structure, depot
/// references, and the stored objective against a fresh recomputation.
inline Solution read_solution(const std::string& path, const Instance& inst) {
    auto in = detail::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, path + ": bad JSON: " + e.what());
    }
    Solution sol;
    try {
        if (j.contains("instance") && j["instance"].get<std::string>() != inst.name)
            fail(ErrorKind::Integrity, path + ": solution is for instance \"" +
                                           j["instance"].get<std::string>() + "\", not \"" +
                                           inst.name + "\"");
        for (const auto& d : j.at("depots")) sol.open_depots.push_back(d.get<int>());
        for (const auto& jr : j.at("routes")) {
            Route r;
            r.depot = jr.at("depot").get<int>();
            for (const auto& c : jr.at("customers")) r.customers.push_back(c.get<int>());
            sol.routes.push_back(std::move(r));
        }
        std::sort(sol.open_depots.begin(), sol.open_depots.end());
        sol.open_depots.erase(std::unique(sol.open_depots.begin(), sol.open_depots.end()),
                              sol.open_depots.end());
        for (int d : sol.open_depots)
            if (d < 0 || d >= inst.num_depots())
                fail(ErrorKind::Integrity, path + ": depot index out of range");
        for (const auto& r : sol.routes)
            if (!std::binary_search(sol.open_depots.begin(), sol.open_depots.end(), r.depot))
                fail(ErrorKind::Integrity,
                     path + ": route depot " + std::to_string(r.depot) + " not listed as open");
        const Cost recomputed = total_cost(sol, inst); // throws Structural on bad visitation
        recompute_caches(sol, inst);
        if (j.contains("objective")) {
            const Cost stored = j["objective"].get<Cost>();
            if (std::abs(stored - recomputed) > inst.cost_tolerance())
                fail(ErrorKind::Integrity,
                     path + ": stored objective " + detail::lossless(stored) +
                         " does not match recomputed " + detail::lossless(recomputed));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Parse, path + ": " + e.what());
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Best-known-solution registry and gap reporting
// ---------------------------------------------------------------------------

/// Instance name -> best known objective, loaded from a CSV with columns
/// instance,bks,set.
struct BksRegistry {
    struct Entry {
        double bks;
        std::string set;
    };
    std::map<std::string, Entry> entries;

    static BksRegistry load(const std::string& path) {
        auto in = detail::open_input(path);
        BksRegistry reg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string name, bks, set;
            std::getline(ls, name, ',');
            std::getline(ls, bks, ',');
            std::getline(ls, set, ',');
            if (name == "instance") continue; // header
            double v = 0;
            try {
                v = std::stod(bks);
            } catch (const std::exception&) {
                fail(ErrorKind::Parse,
                     path + ":" + std::to_string(lineno) + ": bad value \"" + bks + "\"");
            }
            if (v <= 0)
                fail(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": value must be positive");
            if (!reg.entries.emplace(name, Entry{v, set}).second)
                fail(ErrorKind::Parse,
                     path + ":" + std::to_string(lineno) + ": duplicate instance \"" + name + "\"");
        }
        return reg;
    }

    std::optional<double> lookup(const std::string& name) const {
        auto it = entries.find(name);
        if (it == entries.end()) return std::nullopt;
        return it->second.bks;
    }
};

struct RunRecord {
    std::string instance;
    std::uint64_t seed = 0;
    Cost best = 0;
    Cost avg = 0;
    double time_s = 0;
    double ttb_s = 0;
};

/// Per-run rows plus per-instance aggregates. delta = 100*(best-BKS)/BKS.
struct RunReport {
    struct Row {
        RunRecord run;
        std::optional<double> gap_pct;
    };
    struct Aggregate {
        std::string instance;
        int runs = 0;
        Cost best = 0;   // min over runs
        Cost avg = 0;    // mean of per-run averages
        double time_s = 0;
        double ttb_s = 0;
        std::optional<double> gap_pct; // from the min best
    };
    std::vector<Row> rows;
    std::vector<Aggregate> aggregates;
    std::vector<std::string> unmatched;

    std::string to_csv() const {
        std::string out = "instance,seed,best,avg,time_s,ttb_s,gap_pct\n";
        for (const auto& r : rows) {
            out += r.run.instance + ',' + std::to_string(r.run.seed) + ',' +
                   detail::strfmt("%.4f,%.4f,%.3f,%.3f,", r.run.best, r.run.avg, r.run.time_s,
                                  r.run.ttb_s);
            if (r.gap_pct) out += detail::strfmt("%.2f", *r.gap_pct);
            out += '\n';
        }
        for (const auto& a : aggregates) {
            out += a.instance + ",all," +
                   detail::strfmt("%.4f,%.4f,%.3f,%.3f,", a.best, a.avg, a.time_s, a.ttb_s);
            if (a.gap_pct) out += detail::strfmt("%.2f", *a.gap_pct);
            out += '\n';
        }
        return out;
    }

    std::string to_table() const {
        std::string out = detail::strfmt("%-28s %5s %14s %14s %9s %9s %8s\n", "instance", "runs",
                                         "best", "avg", "time_s", "ttb_s", "gap%");
        for (const auto& a : aggregates) {
            out += detail::strfmt("%-28s %5d %14.4f %14.4f %9.3f %9.3f ", a.instance.c_str(),
                                  a.runs, a.best, a.avg, a.time_s, a.ttb_s);
            if (a.gap_pct)
                out += detail::strfmt("%8.2f%s", *a.gap_pct, *a.gap_pct < 0 ? "  improved" : "");
            else
                out += "       -";
            out += '\n';
        }
        if (!unmatched.empty()) {
            out += "unmatched (no BKS entry):\n";
            for (const auto& u : unmatched) out += "  " + u + '\n';
        }
        return out;
    }
};

inline RunReport gap_report(std::vector<RunRecord> runs, const BksRegistry& registry) {
    std::sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.instance != b.instance) return a.instance < b.instance;
        return a.seed < b.seed;
    });
    RunReport report;
    for (const auto& r : runs) {
        RunReport::Row row;
        row.run = r;
        if (auto bks = registry.lookup(r.instance))
            row.gap_pct = 100.0 * (r.best - *bks) / *bks;
        else if (report.unmatched.empty() || report.unmatched.back() != r.instance)
            report.unmatched.push_back(r.instance);
        report.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < report.rows.size();) {
        std::size_t j = i;
        RunReport::Aggregate agg;
        agg.instance = report.rows[i].run.instance;
        agg.best = report.rows[i].run.best;
        while (j < report.rows.size() && report.rows[j].run.instance == agg.instance) {
            const auto& run = report.rows[j].run;
            agg.best = std::min(agg.best, run.best);
            agg.avg += run.avg;
            agg.time_s += run.time_s;
            agg.ttb_s += run.ttb_s;
            ++agg.runs;
            ++j;
        }
        agg.avg /= agg.runs;
        agg.time_s /= agg.runs;
        agg.ttb_s /= agg.runs;
        if (auto bks = registry.lookup(agg.instance))
            agg.gap_pct = 100.0 * (agg.best - *bks) / *bks;
        report.aggregates.push_back(std::move(agg));
        i = j;
    }
    return report;
}

} // namespace hgamp
