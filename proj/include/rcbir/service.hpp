#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rcbir/indexing.hpp"

namespace httplib {
class Server;
}

namespace rcbir {

struct ServiceOptions {
    std::filesystem::path corpus_root;
    std::optional<std::string> cors_origin;
    std::size_t page_size = 4;
    int thumbnail_side = 128;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// HTTP-independent request handlers over an immutable index. Each handler
/// is const and touches no shared mutable state, so one instance serves
/// concurrent requests.
class QueryService {
public:
    QueryService(ImageIndex index, ServiceOptions options);

    [[nodiscard]] const ImageIndex& index() const noexcept { return index_; }

    [[nodiscard]] ApiResponse health() const;
    [[nodiscard]] ApiResponse list_images(std::size_t page, std::size_t page_size) const;
    [[nodiscard]] ApiResponse image_bytes(std::string_view id) const;
    [[nodiscard]] ApiResponse image_mask(std::string_view id, bool as_pgm) const;
    [[nodiscard]] ApiResponse image_meta(std::string_view id) const;
    [[nodiscard]] ApiResponse image_thumbnail(std::string_view id) const;

    /// Query with uploaded image bytes; mode/k/page arrive as form fields.
    [[nodiscard]] ApiResponse query_upload(std::span<const std::uint8_t> image, std::string_view mode,
                                           std::string_view k, std::string_view page) const;
    /// Body: {"id": ..., "mode": ..., "k": ..., "page": ...}.
    [[nodiscard]] ApiResponse query_by_id(std::string_view json_body) const;

    /// Registers every route (and CORS handling) on the server.
    void mount(httplib::Server& server) const;

private:
    ImageIndex index_;
    ServiceOptions options_;
};

/// Splits "host:port"; the port defaults to 8731.
[[nodiscard]] std::pair<std::string, int> parse_bind_address(std::string_view bind);

/// Blocks serving until the process is stopped. Returns non-zero if the
/// address cannot be bound.
int serve(const QueryService& service, std::string_view bind);

}  // namespace rcbir
