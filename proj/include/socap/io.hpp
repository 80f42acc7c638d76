// Delimiter-separated tables with sidecar schema descriptors, domain-schema
// loaders with per-row error collection, and the audit log for dropped
// entities. Format notes: no quoting, fields must not contain the delimiter;
// an empty cell means missing; dates are ISO-8601.
#ifndef SOCAP_IO_HPP
#define SOCAP_IO_HPP

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socap/graph.hpp"
#include "socap/procurement.hpp"

namespace socap {

// Shortest round-trip decimal form; NaN prints empty (missing).
inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            out.emplace_back(line.data() + start, i - start);
            start = i + 1;
        }
    }
    return out;
}

struct RowError {
    std::size_t line = 0;  // 1-based, including any header
    std::string message;
};

// Raw lines of a DSV file, blank lines skipped, trailing \r stripped.
struct RawTable {
    std::vector<std::string> header;  // empty when has_header = false
    std::vector<std::pair<std::size_t, std::string>> lines;  // (line number, content)
};

inline RawTable read_raw_table(const std::string& path, char delim, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    RawTable t;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && has_header) {
            for (auto f : split_fields(line, delim)) t.header.emplace_back(f);
            first = false;
            continue;
        }
        first = false;
        t.lines.emplace_back(lineno, line);
    }
    return t;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header, char delim = ',')
        : out_(path), delim_(delim), n_cols_(header.size()) {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
        write_row_impl(header);
    }

    void write_row(const std::vector<std::string>& fields) {
        if (fields.size() != n_cols_) throw std::logic_error("csv row width mismatch");
        write_row_impl(fields);
    }

private:
    void write_row_impl(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << delim_;
            out_ << fields[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
    char delim_;
    std::size_t n_cols_;
};

// Sidecar descriptor "<table>.schema.json" next to the table.
inline void write_schema_sidecar(const std::string& table_path,
                                 const std::vector<std::pair<std::string, std::string>>& columns,
                                 char delim = ',') {
    nlohmann::json j;
    j["table"] = std::filesystem::path(table_path).filename().string();
    j["delimiter"] = std::string(1, delim);
    j["quoting"] = "none";
    j["missing"] = "empty cell";
    j["columns"] = nlohmann::json::array();
    for (const auto& [name, type] : columns) j["columns"].push_back({{"name", name}, {"type", type}});
    std::ofstream out(table_path + ".schema.json");
    out << j.dump(2) << '\n';
}

// ---- audit log ------------------------------------------------------------

struct AuditEntry {
    std::string kind;    // node | contract | settlement | row
    std::string id;
    std::string reason;  // machine-parsable code
    std::string detail;
};

class AuditLog {
public:
    void add(std::string kind, std::string id, std::string reason, std::string detail = "") {
        entries_.push_back({std::move(kind), std::move(id), std::move(reason), std::move(detail)});
    }

    const std::vector<AuditEntry>& entries() const { return entries_; }

    std::size_t count(std::string_view reason) const {
        std::size_t n = 0;
        for (const auto& e : entries_)
            if (e.reason == reason) ++n;
        return n;
    }

    void write_csv(const std::string& path, char delim = ',') const {
        CsvWriter w(path, {"kind", "id", "reason", "detail"}, delim);
        for (const auto& e : entries_) w.write_row({e.kind, e.id, e.reason, e.detail});
        write_schema_sidecar(path, {{"kind", "string"}, {"id", "string"}, {"reason", "string"}, {"detail", "string"}}, delim);
    }

    void log_stderr() const {
        for (const auto& e : entries_)
            std::cerr << "WARN drop kind=" << e.kind << " id=" << e.id << " reason=" << e.reason
                      << (e.detail.empty() ? "" : " detail=" + e.detail) << '\n';
    }

private:
    std::vector<AuditEntry> entries_;
};

// ---- field parsing ---------------------------------------------------------

inline std::optional<int> parse_int_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size()) throw std::runtime_error("bad integer '" + std::string(f) + "'");
    return v;
}

inline std::optional<double> parse_double_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size()) throw std::runtime_error("bad number '" + std::string(f) + "'");
    return v;
}

inline std::optional<bool> parse_bool_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    if (f == "1" || f == "true") return true;
    if (f == "0" || f == "false") return false;
    throw std::runtime_error("bad boolean '" + std::string(f) + "'");
}

inline std::optional<Date> parse_date_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    return Date::parse_iso(std::string(f));
}

inline std::optional<ProcedureKind> parse_procedure_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    if (f == "open_call") return ProcedureKind::open_call;
    if (f == "direct_award") return ProcedureKind::direct_award;
    if (f == "invite_only") return ProcedureKind::invite_only;
    throw std::runtime_error("bad procedure kind '" + std::string(f) + "'");
}

inline std::optional<AwardCriteria> parse_award_field(std::string_view f) {
    if (f.empty()) return std::nullopt;
    if (f == "price_only") return AwardCriteria::price_only;
    if (f == "non_price") return AwardCriteria::non_price;
    throw std::runtime_error("bad award criteria '" + std::string(f) + "'");
}

inline const char* procedure_name(ProcedureKind k) {
    switch (k) {
        case ProcedureKind::open_call: return "open_call";
        case ProcedureKind::direct_award: return "direct_award";
        case ProcedureKind::invite_only: return "invite_only";
    }
    return "";
}

inline const char* award_name(AwardCriteria a) {
    return a == AwardCriteria::price_only ? "price_only" : "non_price";
}

// ---- domain loaders ---------------------------------------------------------

struct EdgeFile {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<RowError> errors;
    std::size_t rows_seen = 0;
};

inline EdgeFile load_edges(const std::string& path, char delim = ',', bool has_header = true) {
    EdgeFile f;
    for (const auto& [lineno, line] : read_raw_table(path, delim, has_header).lines) {
        ++f.rows_seen;
        const auto fields = split_fields(line, delim);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            f.errors.push_back({lineno, "expected 2 non-empty fields"});
            continue;
        }
        f.edges.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return f;
}

struct AttributionFile {
    std::vector<std::pair<NodeId, SettlementId>> attribution;
    std::vector<RowError> errors;
    std::size_t rows_seen = 0;
};

inline AttributionFile load_attribution(const std::string& path, char delim = ',', bool has_header = true) {
    AttributionFile f;
    for (const auto& [lineno, line] : read_raw_table(path, delim, has_header).lines) {
        ++f.rows_seen;
        const auto fields = split_fields(line, delim);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            f.errors.push_back({lineno, "expected 2 non-empty fields"});
            continue;
        }
        f.attribution.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return f;
}

inline constexpr std::array<const char*, 12> kContractColumns = {
    "contract_id", "settlement_id", "cpv_code", "n_bidders", "procedure_kind", "call_published",
    "call_date", "submission_deadline", "decision_date", "eligibility_criteria_len",
    "award_criteria", "call_modified"};

struct ContractsFile {
    std::vector<ContractRecord> contracts;
    std::vector<RowError> errors;
    std::size_t rows_seen = 0;
};

inline ContractsFile load_contracts(const std::string& path, char delim = ',', bool has_header = true) {
    ContractsFile f;
    for (const auto& [lineno, line] : read_raw_table(path, delim, has_header).lines) {
        ++f.rows_seen;
        const auto fields = split_fields(line, delim);
        if (fields.size() != kContractColumns.size()) {
            f.errors.push_back({lineno, "expected " + std::to_string(kContractColumns.size()) + " fields"});
            continue;
        }
        try {
            ContractRecord c;
            c.contract_id = std::string(fields[0]);
            c.settlement_id = std::string(fields[1]);
            c.cpv_code = std::string(fields[2]);
            if (c.contract_id.empty() || c.settlement_id.empty())
                throw std::runtime_error("contract_id and settlement_id are required");
            c.n_bidders = parse_int_field(fields[3]);
            c.procedure_kind = parse_procedure_field(fields[4]);
            c.call_published = parse_bool_field(fields[5]);
            c.call_date = parse_date_field(fields[6]);
            c.submission_deadline = parse_date_field(fields[7]);
            c.decision_date = parse_date_field(fields[8]);
            c.eligibility_criteria_len = parse_int_field(fields[9]);
            c.award_criteria = parse_award_field(fields[10]);
            c.call_modified = parse_bool_field(fields[11]);
            f.contracts.push_back(std::move(c));
        } catch (const std::exception& e) {
            f.errors.push_back({lineno, e.what()});
        }
    }
    return f;
}

inline void write_contracts(const std::string& path, const std::vector<ContractRecord>& contracts,
                            char delim = ',') {
    std::vector<std::string> header(kContractColumns.begin(), kContractColumns.end());
    CsvWriter w(path, header, delim);
    for (const auto& c : contracts) {
        w.write_row({c.contract_id, c.settlement_id, c.cpv_code,
                     c.n_bidders ? std::to_string(*c.n_bidders) : "",
                     c.procedure_kind ? procedure_name(*c.procedure_kind) : "",
                     c.call_published ? (*c.call_published ? "1" : "0") : "",
                     c.call_date ? c.call_date->to_iso() : "",
                     c.submission_deadline ? c.submission_deadline->to_iso() : "",
                     c.decision_date ? c.decision_date->to_iso() : "",
                     c.eligibility_criteria_len ? std::to_string(*c.eligibility_criteria_len) : "",
                     c.award_criteria ? award_name(*c.award_criteria) : "",
                     c.call_modified ? (*c.call_modified ? "1" : "0") : ""});
    }
    write_schema_sidecar(path,
                         {{"contract_id", "string"},
                          {"settlement_id", "string"},
                          {"cpv_code", "string"},
                          {"n_bidders", "int"},
                          {"procedure_kind", "enum:open_call|direct_award|invite_only"},
                          {"call_published", "bool"},
                          {"call_date", "date"},
                          {"submission_deadline", "date"},
                          {"decision_date", "date"},
                          {"eligibility_criteria_len", "int"},
                          {"award_criteria", "enum:price_only|non_price"},
                          {"call_modified", "bool"}},
                         delim);
}

inline void write_edges(const std::string& path, const std::vector<std::pair<NodeId, NodeId>>& edges,
                        char delim = ',') {
    CsvWriter w(path, {"node_id", "node_id"}, delim);
    for (const auto& [a, b] : edges) w.write_row({a, b});
    write_schema_sidecar(path, {{"node_id", "string"}, {"node_id", "string"}}, delim);
}

inline void write_attribution(const std::string& path,
                              const std::vector<std::pair<NodeId, SettlementId>>& attribution,
                              char delim = ',') {
    CsvWriter w(path, {"node_id", "settlement_id"}, delim);
    for (const auto& [n, s] : attribution) w.write_row({n, s});
    write_schema_sidecar(path, {{"node_id", "string"}, {"settlement_id", "string"}}, delim);
}

// Control table: settlement_id plus every control except log_n_contracts,
// which is derived from the contract corpus at join time.
inline constexpr std::array<const char*, 10> kControlFileColumns = {
    "income_per_capita", "log_population", "iwiw_use_rate", "mayor_victory_margin",
    "pct_hs_grads", "distance_to_capital_minutes", "share_inactive",
    "unemployment_rate", "share_over_60", "has_university"};

struct ControlRow {
    std::string settlement_id;
    std::array<double, 10> values{};
};

struct ControlsFile {
    std::vector<ControlRow> rows;
    std::vector<RowError> errors;
    std::size_t rows_seen = 0;
};

inline ControlsFile load_controls(const std::string& path, char delim = ',', bool has_header = true) {
    ControlsFile f;
    for (const auto& [lineno, line] : read_raw_table(path, delim, has_header).lines) {
        ++f.rows_seen;
        const auto fields = split_fields(line, delim);
        if (fields.size() != kControlFileColumns.size() + 1) {
            f.errors.push_back({lineno, "expected " + std::to_string(kControlFileColumns.size() + 1) + " fields"});
            continue;
        }
        try {
            ControlRow r;
            r.settlement_id = std::string(fields[0]);
            if (r.settlement_id.empty()) throw std::runtime_error("settlement_id is required");
            for (std::size_t j = 0; j < r.values.size(); ++j) {
                const auto v = parse_double_field(fields[j + 1]);
                if (!v) throw std::runtime_error(std::string("missing ") + kControlFileColumns[j]);
                r.values[j] = *v;
            }
            f.rows.push_back(std::move(r));
        } catch (const std::exception& e) {
            f.errors.push_back({lineno, e.what()});
        }
    }
    return f;
}

inline void write_controls(const std::string& path, const std::vector<ControlRow>& rows, char delim = ',') {
    std::vector<std::string> header{"settlement_id"};
    header.insert(header.end(), kControlFileColumns.begin(), kControlFileColumns.end());
    CsvWriter w(path, header, delim);
    for (const auto& r : rows) {
        std::vector<std::string> fields{r.settlement_id};
        for (double v : r.values) fields.push_back(format_double(v));
        w.write_row(fields);
    }
    std::vector<std::pair<std::string, std::string>> schema{{"settlement_id", "string"}};
    for (const char* c : kControlFileColumns) schema.emplace_back(c, "double");
    write_schema_sidecar(path, schema, delim);
}

// Group-membership file for the two-sample comparison: settlement_id,label.
struct GroupsFile {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<RowError> errors;
};

inline GroupsFile load_groups(const std::string& path, char delim = ',', bool has_header = true) {
    GroupsFile f;
    for (const auto& [lineno, line] : read_raw_table(path, delim, has_header).lines) {
        const auto fields = split_fields(line, delim);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            f.errors.push_back({lineno, "expected 2 non-empty fields"});
            continue;
        }
        f.rows.emplace_back(std::string(fields[0]), std::string(fields[1]));
    }
    return f;
}

}  // namespace socap

#endif
