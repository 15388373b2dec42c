#pragma once

#include <map>
#include <string>
#include <vector>

namespace cbamgrid {

// Key/value configuration document: one `key = value` pair per line,
// `#` starts a comment. Used for synthetic specs and training configs.
class KvConfig {
public:
    static KvConfig from_file(const std::string& path);
    static KvConfig from_string(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;

    // Getters raise Config errors naming the missing/invalid key.
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const;  // comma-separated

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    long long get_int_or(const std::string& key, long long fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::string> entries_;
    std::string origin_;
};

}  // namespace cbamgrid
