#pragma once

#include <string>
#include <vector>

namespace sohkan {

/// Formats a double with 17 significant digits, enough to round-trip exactly.
[[nodiscard]] std::string format_g17(double value);

/// Small append-only JSON writer with deterministic number formatting. The
/// caller is responsible for well-formedness; this is plumbing for the
/// handful of fixed schemas the pipeline emits.
class JsonWriter {
public:
    void begin_object();
    void end_object();
    void begin_array(const std::string& key);
    void begin_object(const std::string& key);
    void end_array();

    void field(const std::string& key, double value);
    void field(const std::string& key, int value);
    void field(const std::string& key, long long value);
    void field(const std::string& key, unsigned long long value);
    void field(const std::string& key, bool value);
    void field(const std::string& key, const std::string& value);
    void field(const std::string& key, const std::vector<double>& values);

    void array_element(double value);
    void array_element(const std::string& value);

    [[nodiscard]] const std::string& str() const { return out_; }
    void write_file(const std::string& path) const;

private:
    void comma();
    void indent();
    void key_prefix(const std::string& key);

    std::string out_;
    int depth_ = 0;
    bool need_comma_ = false;
};

/// Escapes a string for embedding in JSON output.
[[nodiscard]] std::string json_escape(const std::string& text);

}  // namespace sohkan
