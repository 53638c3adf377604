#pragma once

// Row-oriented tables written as CSV or JSON. Floats use 15 significant
// digits so identical runs produce identical bytes.

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace arithdyn::report {

using Cell = std::variant<std::monostate, bool, long, double, std::string>;

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : cols_(std::move(columns)) {}

    void add(std::vector<Cell> row) {
        row.resize(cols_.size());
        rows_.push_back(std::move(row));
    }
    std::size_t size() const { return rows_.size(); }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < cols_.size(); ++i) os << (i ? "," : "") << cols_[i];
        os << "\n";
        for (auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
            os << "\n";
        }
    }

    void write_json(std::ostream& os) const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (auto& r : rows_) {
            nlohmann::ordered_json o;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const Cell& c = r[i];
                if (std::holds_alternative<std::monostate>(c)) o[cols_[i]] = nullptr;
                else if (auto b = std::get_if<bool>(&c)) o[cols_[i]] = *b;
                else if (auto l = std::get_if<long>(&c)) o[cols_[i]] = *l;
                // through the 15-digit text so JSON and CSV agree
                else if (auto d = std::get_if<double>(&c)) o[cols_[i]] = nlohmann::ordered_json::parse(json_number(*d));
                else o[cols_[i]] = std::get<std::string>(c);
            }
            arr.push_back(std::move(o));
        }
        os << arr.dump(2) << "\n";
    }

private:
    static std::string json_number(double d) {
        if (!std::isfinite(d)) return d > 0 ? "\"inf\"" : (d < 0 ? "\"-inf\"" : "\"nan\"");
        return format_double(d);
    }
    static std::string csv_cell(const Cell& c) {
        if (std::holds_alternative<std::monostate>(c)) return "";
        if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
        if (auto l = std::get_if<long>(&c)) return std::to_string(*l);
        if (auto d = std::get_if<double>(&c)) return format_double(*d);
        const std::string& s = std::get<std::string>(c);
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }

    std::vector<std::string> cols_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace arithdyn::report
