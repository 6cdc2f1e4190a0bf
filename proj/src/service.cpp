#include "rcbir/service.hpp"

#include <charconv>
#include <cstdio>

#include <httplib.h>

#include "rcbir/errors.hpp"
#include "rcbir/image_io.hpp"
#include "rcbir/reports.hpp"
#include "rcbir/retrieval.hpp"

namespace rcbir {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_response(int status, std::string_view code, std::string_view message, Json extra = {}) {
    Json body{{"error", message}, {"code", code}};
    if (extra.is_object()) body.update(extra);
    return json_response(status, body);
}

ApiResponse binary_response(std::string_view content_type, std::span<const std::uint8_t> bytes) {
    return {200, std::string(content_type), std::string(bytes.begin(), bytes.end())};
}

std::optional<std::size_t> parse_count(std::string_view text) {
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return value;
}

std::string image_ref(std::string_view id, std::string_view what = {}) {
    std::string ref = "/images/" + httplib::detail::encode_url(std::string(id));
    if (!what.empty()) ref += "/" + std::string(what);
    return ref;
}

struct QueryParams {
    Mode mode = Mode::Rbir;
    std::size_t k = 10;
    std::size_t page = 1;
};

// Unknown or malformed fields yield a message for a 400 response.
std::optional<std::string> read_params(const Json& mode, const Json& k, const Json& page, QueryParams& out) {
    if (!mode.is_null()) {
        if (!mode.is_string()) return "mode must be a string";
        const auto m = parse_mode(mode.get<std::string>());
        if (!m) return "mode must be rbir, lbir or cbir";
        out.mode = *m;
    }
    if (!k.is_null()) {
        if (!k.is_number_unsigned() || k.get<std::size_t>() == 0) return "k must be a positive integer";
        out.k = k.get<std::size_t>();
    }
    if (!page.is_null()) {
        if (!page.is_number_unsigned() || page.get<std::size_t>() == 0) return "page must be a positive integer";
        out.page = page.get<std::size_t>();
    }
    return std::nullopt;
}

}  // namespace

std::pair<std::string, int> parse_bind_address(std::string_view bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string_view::npos) return {std::string(bind), 8731};
    int port = 0;
    const auto digits = bind.substr(colon + 1);
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc{} || end != digits.data() + digits.size() || port < 0 || port > 65535) {
        throw ValidationError("invalid bind address: " + std::string(bind));
    }
    return {std::string(bind.substr(0, colon)), port};
}

QueryService::QueryService(ImageIndex index, ServiceOptions options)
    : index_(std::move(index)), options_(std::move(options)) {
    if (options_.page_size == 0) options_.page_size = 4;
}

ApiResponse QueryService::health() const {
    return json_response(200, Json{{"status", "ok"},
                                   {"index_version", index_.metadata().version},
                                   {"entries", index_.entries().size()}});
}

ApiResponse QueryService::list_images(std::size_t page, std::size_t page_size) const {
    if (page == 0 || page_size == 0) return error_response(400, "bad_request", "page and page_size must be positive");
    const auto& entries = index_.entries();
    const std::size_t first = (page - 1) * page_size;
    Json items = Json::array();
    for (std::size_t i = first; i < entries.size() && i < first + page_size; ++i) {
        const auto& e = entries[i];
        items.push_back(Json{{"id", e.image_id},
                             {"class", e.class_label ? Json(*e.class_label) : Json(nullptr)},
                             {"cell", e.location_cell},
                             {"key", e.combined_key}});
    }
    return json_response(200, Json{{"page", page},
                                   {"page_size", page_size},
                                   {"total", entries.size()},
                                   {"page_count", (entries.size() + page_size - 1) / page_size},
                                   {"items", std::move(items)}});
}

ApiResponse QueryService::image_bytes(std::string_view id) const {
    const IndexEntry* e = index_.find(id);
    if (!e) return error_response(404, "not_found", "unknown image id");
    try {
        const auto bytes = read_file_bytes(options_.corpus_root / e->source_path);
        return binary_response(mime_type(sniff_format(bytes)), bytes);
    } catch (const Error& err) {
        return error_response(500, err.code(), err.what());
    }
}

ApiResponse QueryService::image_mask(std::string_view id, bool as_pgm) const {
    const IndexEntry* e = index_.find(id);
    if (!e) return error_response(404, "not_found", "unknown image id");
    try {
        const GrayImage img = load_image(options_.corpus_root / e->source_path);
        const GrayImage mask = mask_to_image(segment(img).roi.mask);
        if (as_pgm) return binary_response(mime_type(ImageFormat::Pgm), encode_pgm(mask));
        return binary_response(mime_type(ImageFormat::Png), encode_png(mask));
    } catch (const NoRegionError& err) {
        return error_response(422, err.code(), err.what());
    } catch (const Error& err) {
        return error_response(500, err.code(), err.what());
    }
}

ApiResponse QueryService::image_meta(std::string_view id) const {
    const IndexEntry* e = index_.find(id);
    if (!e) return error_response(404, "not_found", "unknown image id");
    return json_response(200, to_json(*e));
}

ApiResponse QueryService::image_thumbnail(std::string_view id) const {
    const IndexEntry* e = index_.find(id);
    if (!e) return error_response(404, "not_found", "unknown image id");
    try {
        const GrayImage img = load_image(options_.corpus_root / e->source_path);
        return binary_response(mime_type(ImageFormat::Png),
                               encode_png(make_thumbnail(img, options_.thumbnail_side)));
    } catch (const Error& err) {
        return error_response(500, err.code(), err.what());
    }
}

namespace {

Json paged_response(const QueryResult& result, std::size_t page, std::size_t page_size, Json query) {
    Json body = to_json(result);
    for (auto& item : body["results"]) {
        item["thumbnail"] = image_ref(item["image_id"].get<std::string>(), "thumbnail");
    }
    const std::size_t total = result.hits.size();
    const std::size_t first = std::min(total, (page - 1) * page_size);
    const std::size_t last = std::min(total, first + page_size);
    body["page"] = Json{{"page", page},
                        {"page_size", page_size},
                        {"page_count", (total + page_size - 1) / page_size},
                        {"first", first},
                        {"last", last}};
    body["query"] = std::move(query);
    return body;
}

}  // namespace

ApiResponse QueryService::query_upload(std::span<const std::uint8_t> image, std::string_view mode,
                                       std::string_view k, std::string_view page) const {
    QueryParams params;
    if (!mode.empty()) {
        const auto m = parse_mode(mode);
        if (!m) return error_response(400, "bad_request", "mode must be rbir, lbir or cbir");
        params.mode = *m;
    }
    if (!k.empty()) {
        const auto v = parse_count(k);
        if (!v || *v == 0) return error_response(400, "bad_request", "k must be a positive integer");
        params.k = *v;
    }
    if (!page.empty()) {
        const auto v = parse_count(page);
        if (!v || *v == 0) return error_response(400, "bad_request", "page must be a positive integer");
        params.page = *v;
    }

    GrayImage img;
    try {
        img = decode_image(image);
    } catch (const Error& err) {
        return error_response(400, err.code(), err.what());
    }

    try {
        QueryOptions qopt;
        qopt.mode = params.mode;
        qopt.k = params.k;
        const QueryResult result = query(index_, img, qopt);

        Json q{{"source", "upload"}, {"features", to_json(result.query_features)}};
        if (params.mode != Mode::Cbir) {
            const Segmentation seg = segment(img);
            q["bbox"] = to_json(seg.roi.bbox);
            q["cell"] = location_cell(seg.roi.bbox, img.width(), img.height());
            q["threshold"] = to_json(seg.report);
            const auto png = encode_png(mask_to_image(seg.roi.mask));
            q["mask"] = "data:image/png;base64," +
                        httplib::detail::base64_encode(std::string(png.begin(), png.end()));
        }
        return json_response(200, paged_response(result, params.page, options_.page_size, std::move(q)));
    } catch (const QuerySegmentationError& err) {
        return error_response(422, "no_region", err.what(),
                              Json{{"threshold", to_json(compute_t_star(img))}});
    } catch (const ValidationError& err) {
        return error_response(400, err.code(), err.what());
    } catch (const Error& err) {
        return error_response(500, err.code(), err.what());
    }
}

ApiResponse QueryService::query_by_id(std::string_view json_body) const {
    const Json body = Json::parse(json_body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return error_response(400, "bad_request", "body must be a JSON object");
    if (!body.contains("id") || !body["id"].is_string()) return error_response(400, "bad_request", "id is required");

    QueryParams params;
    auto field = [&](const char* name) { return body.contains(name) ? body[name] : Json(nullptr); };
    if (auto err = read_params(field("mode"), field("k"), field("page"), params)) {
        return error_response(400, "bad_request", *err);
    }

    const auto id = body["id"].get<std::string>();
    const IndexEntry* e = index_.find(id);
    if (!e) return error_response(404, "not_found", "unknown image id");

    QueryOptions qopt;
    qopt.mode = params.mode;
    qopt.k = params.k;
    const QueryResult result = run_query(index_, probe_entry(*e), qopt);

    Json q{{"source", "id"}, {"id", id}, {"features", to_json(result.query_features)}};
    if (params.mode != Mode::Cbir) {
        q["bbox"] = to_json(e->roi_bbox);
        q["cell"] = e->location_cell;
        q["mask"] = image_ref(id, "mask");
    }
    return json_response(200, paged_response(result, params.page, options_.page_size, std::move(q)));
}

void QueryService::mount(httplib::Server& server) const {
    auto send = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body, api.content_type);
    };

    if (options_.cors_origin) {
        const std::string origin = *options_.cors_origin;
        server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
        });
        server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }

    server.Get("/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });

    server.Get("/images", [this, send](const httplib::Request& req, httplib::Response& res) {
        auto number = [&](const char* key, std::size_t fallback) -> std::optional<std::size_t> {
            if (!req.has_param(key)) return fallback;
            return parse_count(req.get_param_value(key));
        };
        const auto page = number("page", 1);
        const auto size = number("page_size", options_.page_size);
        if (!page || !size) return send(res, error_response(400, "bad_request", "page and page_size must be integers"));
        send(res, list_images(*page, *size));
    });

    server.Get(R"(/images/([^/]+)/mask)", [this, send](const httplib::Request& req, httplib::Response& res) {
        const bool pgm = req.has_param("format") && req.get_param_value("format") == "pgm";
        send(res, image_mask(req.matches[1].str(), pgm));
    });
    server.Get(R"(/images/([^/]+)/meta)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, image_meta(req.matches[1].str()));
    });
    server.Get(R"(/images/([^/]+)/thumbnail)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, image_thumbnail(req.matches[1].str()));
    });
    server.Get(R"(/images/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, image_bytes(req.matches[1].str()));
    });

    server.Post("/query/by-id", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, query_by_id(req.body));
    });
    server.Post("/query", [this, send](const httplib::Request& req, httplib::Response& res) {
        if (!req.is_multipart_form_data() || !req.has_file("image")) {
            return send(res, error_response(400, "bad_request", "expected multipart form with an image file"));
        }
        const auto file = req.get_file_value("image");
        auto text = [&](const char* key) { return req.has_file(key) ? req.get_file_value(key).content : std::string(); };
        const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(file.content.data()),
                                                  file.content.size());
        send(res, query_upload(bytes, text("mode"), text("k"), text("page")));
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        const ApiResponse api = error_response(500, "internal", what);
        res.status = api.status;
        res.set_content(api.body, api.content_type);
    });
}

int serve(const QueryService& service, std::string_view bind) {
    const auto [host, port] = parse_bind_address(bind);
    httplib::Server server;
    service.mount(server);
    if (!server.bind_to_port(host, port)) {
        std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
        return 1;
    }
    std::fprintf(stderr, "serving %zu images on http://%s:%d\n", service.index().entries().size(), host.c_str(),
                 port);
    return server.listen_after_bind() ? 0 : 1;
}

}  // namespace rcbir
