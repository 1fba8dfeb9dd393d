#include "phaselab/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace phaselab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// strips a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

nlohmann::json parse_scalar(const std::string& raw, int line_no) {
    std::string v = trim(raw);
    if (v.empty())
        throw std::runtime_error("toml: empty value at line " + std::to_string(line_no));
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw std::runtime_error("toml: unterminated string at line " +
                                     std::to_string(line_no));
        return v.substr(1, v.size() - 2);
    }
    if (v == "true") return true;
    if (v == "false") return false;
    try {
        std::size_t used = 0;
        if (v.find_first_of(".eE") == std::string::npos ||
            (v.size() > 1 && (v[0] == '0') && v[1] == 'x')) {
            long long iv = std::stoll(v, &used);
            if (used == v.size()) return iv;
        }
        double dv = std::stod(v, &used);
        if (used == v.size()) return dv;
    } catch (const std::exception&) {
    }
    throw std::runtime_error("toml: cannot parse value '" + v + "' at line " +
                             std::to_string(line_no));
}

nlohmann::json parse_value(const std::string& raw, int line_no) {
    std::string v = trim(raw);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']')
            throw std::runtime_error("toml: unterminated array at line " +
                                     std::to_string(line_no));
        nlohmann::json arr = nlohmann::json::array();
        std::string inner = v.substr(1, v.size() - 2);
        std::string item;
        bool in_str = false;
        for (char c : inner) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                if (!trim(item).empty()) arr.push_back(parse_scalar(item, line_no));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty()) arr.push_back(parse_scalar(item, line_no));
        return arr;
    }
    return parse_scalar(v, line_no);
}

nlohmann::json* descend(nlohmann::json& root, const std::string& dotted,
                        int line_no) {
    nlohmann::json* cur = &root;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        part = trim(part);
        if (part.empty())
            throw std::runtime_error("toml: bad table name at line " +
                                     std::to_string(line_no));
        cur = &(*cur)[part];
    }
    return cur;
}

} // namespace

nlohmann::json parse_toml_lite(const std::string& text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("toml: bad table header at line " +
                                         std::to_string(line_no));
            table = descend(root, line.substr(1, line.size() - 2), line_no);
            continue;
        }
        std::size_t eq = std::string::npos;
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '=' && !in_str) { eq = i; break; }
        }
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value at line " +
                                     std::to_string(line_no));
        std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::runtime_error("toml: empty key at line " +
                                     std::to_string(line_no));
        (*table)[key] = parse_value(line.substr(eq + 1), line_no);
    }
    return root;
}

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return nlohmann::json::parse(text);
    return parse_toml_lite(text);
}

} // namespace phaselab
