#include "levysde/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "levysde/errors.hpp"
#include "levysde/parallel.hpp"

namespace levysde {

namespace {

struct Value;
using Array = std::vector<Value>;

struct Value {
    std::variant<double, std::string, bool, Array> data;
};

class Parser {
public:
    Parser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    Value parse_value()
    {
        skip_space();
        if (pos_ >= text_.size()) fail("missing value");
        const char ch = text_[pos_];
        if (ch == '[') return parse_array();
        if (ch == '"') return parse_string();
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return {true};
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return {false};
        }
        return parse_number();
    }

    void expect_end()
    {
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing characters");
    }

private:
    void skip_space()
    {
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (ch == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    Value parse_array()
    {
        ++pos_;
        Array items;
        for (;;) {
            skip_space();
            if (pos_ >= text_.size()) fail("unterminated array");
            if (text_[pos_] == ']') {
                ++pos_;
                return {items};
            }
            items.push_back(parse_value());
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
        }
    }

    Value parse_string()
    {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') out.push_back(text_[pos_++]);
        if (pos_ >= text_.size()) fail("unterminated string");
        ++pos_;
        return {out};
    }

    Value parse_number()
    {
        std::size_t end = pos_;
        while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                      text_[end] == '.' || text_[end] == '-' || text_[end] == '+' ||
                                      text_[end] == '_')) {
            ++end;
        }
        std::string token(text_.substr(pos_, end - pos_));
        std::erase(token, '_');
        if (token.empty()) fail("expected a value");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            fail("invalid number '" + token + "'");
        }
        if (used != token.size()) fail("invalid number '" + token + "'");
        pos_ = end;
        return {v};
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("config line " + std::to_string(line_) + ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

int bracket_balance(std::string_view s)
{
    int depth = 0;
    bool in_string = false;
    for (char ch : s) {
        if (ch == '"') in_string = !in_string;
        if (in_string) continue;
        if (ch == '#') break;
        if (ch == '[') ++depth;
        if (ch == ']') --depth;
    }
    return depth;
}

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double as_number(const Value& v, const std::string& key)
{
    if (const auto* d = std::get_if<double>(&v.data)) return *d;
    throw ConfigError("config key '" + key + "' must be a number");
}

std::string as_string(const Value& v, const std::string& key)
{
    if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
    throw ConfigError("config key '" + key + "' must be a string");
}

std::vector<double> as_numbers(const Value& v, const std::string& key)
{
    if (const auto* d = std::get_if<double>(&v.data)) return {*d};
    const auto* arr = std::get_if<Array>(&v.data);
    if (!arr) throw ConfigError("config key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) out.push_back(as_number(item, key));
    return out;
}

long long as_integer(const Value& v, const std::string& key)
{
    const double d = as_number(v, key);
    if (d != std::floor(d)) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<long long>(d);
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view text)
{
    std::map<std::string, Value> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t start_line = lineno;
        std::string stmt = line;
        while (bracket_balance(stmt) > 0 && std::getline(in, line)) {
            ++lineno;
            stmt += '\n' + line;
        }
        const std::string body = trim(stmt);
        if (body.empty() || body.front() == '#') continue;
        if (body.front() == '[') {
            throw ConfigError("config line " + std::to_string(start_line) + ": tables are not supported");
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(start_line) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        Parser parser(std::string_view(body).substr(eq + 1), start_line);
        Value value = parser.parse_value();
        parser.expect_end();
        if (!entries.emplace(key, std::move(value)).second) {
            throw ConfigError("config key '" + key + "' given twice");
        }
    }

    ExperimentConfig cfg;
    std::string driver = "nig";
    double delta = 1.0;
    double rate = 1.0;
    bool have_theta = false;
    for (const auto& [key, value] : entries) {
        if (key == "model") {
            cfg.model = as_string(value, key);
        } else if (key == "theta0") {
            const auto v = as_numbers(value, key);
            cfg.theta0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
            have_theta = true;
        } else if (key == "driver") {
            driver = as_string(value, key);
        } else if (key == "delta") {
            delta = as_number(value, key);
        } else if (key == "rate") {
            rate = as_number(value, key);
        } else if (key == "grid") {
            const auto* rows = std::get_if<Array>(&value.data);
            if (!rows) throw ConfigError("config key 'grid' must be an array of [T, h] pairs");
            for (const auto& row : *rows) {
                const auto pair = as_numbers(row, key);
                if (pair.size() != 2) throw ConfigError("grid entries must be [T, h] pairs");
                cfg.grid.push_back({pair[0], pair[1]});
            }
        } else if (key == "u") {
            cfg.us = as_numbers(value, key);
        } else if (key == "replications") {
            cfg.replications = static_cast<int>(as_integer(value, key));
        } else if (key == "base_seed") {
            const auto s = as_integer(value, key);
            if (s < 0) throw ConfigError("base_seed must be non-negative");
            cfg.base_seed = static_cast<std::uint64_t>(s);
        } else if (key == "fine_factor") {
            cfg.fine_factor = static_cast<int>(as_integer(value, key));
        } else if (key == "ci_level") {
            cfg.ci_level = as_number(value, key);
        } else if (key == "workers") {
            const auto w = as_integer(value, key);
            if (w < 0) throw ConfigError("workers must be non-negative");
            // 0 picks the hardware concurrency.
            cfg.workers = w == 0 ? default_workers() : static_cast<unsigned>(w);
        } else if (key == "x0") {
            cfg.x0 = as_number(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (!have_theta) throw ConfigError("config must set theta0");
    try {
        if (driver == "nig") {
            cfg.driver = LevyDriver::nig(delta);
        } else if (driver == "cpn") {
            cfg.driver = LevyDriver::compound_poisson_normal(rate);
        } else {
            throw ConfigError("driver must be \"nig\" or \"cpn\"");
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    try {
        cfg.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

} // namespace levysde
