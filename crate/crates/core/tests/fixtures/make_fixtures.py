#!/usr/bin/env python3
"""Writes the fixture PDFs and expected.json.

Expected values come from how each file is built, never from the Rust
extractor: graph metrics via networkx over the tokens placed in the content
streams, keyword counts via regular expressions over the written bytes,
date deltas via datetime. Every parseable file is also opened with pypdf
and the page count, metadata, encryption and actions it reports are checked
against the intended construction.

Run from this directory: python3 make_fixtures.py
"""

import datetime as dt
import io
import json
import re
import struct
import zlib
from pathlib import Path

import networkx as nx
from pypdf import PdfReader

HERE = Path(__file__).resolve().parent
FLAG_NAMES = ["JS", "JavaScript", "OpenAction", "AA", "Launch", "URI",
              "RichMedia", "AcroForm", "EmbeddedFile", "XFA", "Encrypt"]


# ---------------------------------------------------------------- writing

def stream_obj(dict_body, data, compress=False):
    if compress:
        data = zlib.compress(data)
        dict_body += " /Filter /FlateDecode"
    head = f"<< {dict_body} /Length {len(data)} >>\nstream\n".encode()
    return head + data + b"\nendstream"


def build(objects, root, info=None, version="1.4", extra_trailer="",
          corrupt_xref=False):
    """objects: {num: bytes body}. Classic xref; offsets computed here."""
    out = io.BytesIO()
    out.write(f"%PDF-{version}\n%\xe2\xe3\xcf\xd3\n".encode("latin-1"))
    offsets = {}
    for num in sorted(objects):
        offsets[num] = out.tell()
        out.write(f"{num} 0 obj\n".encode() + objects[num] + b"\nendobj\n")
    size = max(objects) + 1
    xref_at = out.tell()
    out.write(f"xref\n0 {size}\n0000000000 65535 f \n".encode())
    for num in range(1, size):
        if num in offsets:
            off = 7 + num * 13 if corrupt_xref else offsets[num]
            out.write(f"{off:010d} 00000 n \n".encode())
        else:
            out.write(b"0000000000 65535 f \n")
    trailer = f"<< /Size {size} /Root {root} 0 R"
    if info:
        trailer += f" /Info {info} 0 R"
    trailer += f" {extra_trailer}>>"
    startxref = xref_at + 3 if corrupt_xref else xref_at
    out.write(f"trailer\n{trailer}\nstartxref\n{startxref}\n%%EOF\n".encode())
    return out.getvalue()


def build_with_object_stream(plain, packed, root, version="1.5"):
    """`plain` objects are written directly, `packed` ones go into a Flate
    object stream; the index is a compressed xref stream."""
    out = io.BytesIO()
    out.write(f"%PDF-{version}\n%\xe2\xe3\xcf\xd3\n".encode("latin-1"))
    offsets = {}
    for num in sorted(plain):
        offsets[num] = out.tell()
        out.write(f"{num} 0 obj\n".encode() + plain[num] + b"\nendobj\n")

    objstm_num = max(list(plain) + list(packed)) + 1
    header, body = [], b""
    for num in sorted(packed):
        header.append(f"{num} {len(body)}")
        body += packed[num] + b"\n"
    header = (" ".join(header) + "\n").encode()
    offsets[objstm_num] = out.tell()
    out.write(f"{objstm_num} 0 obj\n".encode() + stream_obj(
        f"/Type /ObjStm /N {len(packed)} /First {len(header)}",
        header + body, compress=True) + b"\nendobj\n")

    xref_num = objstm_num + 1
    size = xref_num + 1
    xref_at = out.tell()
    rows = b""
    for num in range(size):
        if num == 0:
            rows += struct.pack(">BIH", 0, 0, 65535)
        elif num in packed:
            rows += struct.pack(">BIH", 2, objstm_num, sorted(packed).index(num))
        elif num == xref_num:
            rows += struct.pack(">BIH", 1, xref_at, 0)
        elif num in offsets:
            rows += struct.pack(">BIH", 1, offsets[num], 0)
        else:
            rows += struct.pack(">BIH", 0, 0, 65535)
    out.write(f"{xref_num} 0 obj\n".encode() + stream_obj(
        f"/Type /XRef /Size {size} /W [1 4 2] /Root {root} 0 R",
        rows, compress=True) + b"\nendobj\n")
    out.write(f"startxref\n{xref_at}\n%%EOF\n".encode())
    return out.getvalue()


def text_content(lines):
    ops = []
    for i, line in enumerate(lines):
        esc = line.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)")
        ops.append(f"BT /F1 12 Tf 72 {720 - 14 * i} Td ({esc}) Tj ET")
    return "\n".join(ops).encode("latin-1")


FONT = b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>"


def simple_doc(page_texts, catalog_extra="", page_extra="", info=None,
               extra_objects=None, compress=False, resources_extra="",
               content_prefix=b""):
    """Catalog 1, Pages 2, Font 3, then per page a Page and its content.
    Extra objects start at 20; info goes to 30."""
    objs = {3: FONT}
    kids = []
    num = 4
    for text in page_texts:
        page, content = num, num + 1
        num += 2
        kids.append(page)
        objs[page] = (f"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] "
                      f"/Resources << /Font << /F1 3 0 R >> {resources_extra}>> "
                      f"/Contents {content} 0 R {page_extra}>>").encode()
        objs[content] = stream_obj("", content_prefix + text_content(text), compress)
    objs[2] = (f"<< /Type /Pages /Kids [{' '.join(f'{k} 0 R' for k in kids)}] "
               f"/Count {len(kids)} >>").encode()
    objs[1] = f"<< /Type /Catalog /Pages 2 0 R {catalog_extra}>>".encode()
    objs.update(extra_objects or {})
    info_num = None
    if info is not None:
        info_num = 30
        objs[30] = info
    return objs, info_num


# ---------------------------------------------------------------- oracles

def tokenize(text):
    return [t.lower() for t in re.split(r"[^0-9A-Za-z]+", text) if t]


def graph_expect(page_texts, window=2):
    per_page = []
    for lines in page_texts:
        toks = [t for line in lines for t in tokenize(line)]
        g = nx.Graph()
        for i, t in enumerate(toks):
            g.add_node(t)
            for prev in toks[max(0, i - window + 1):i]:
                if prev != t:
                    g.add_edge(prev, t)
        n = g.number_of_nodes()
        if n < 2:
            dens, dc_mean, dc_max = 0.0, 0.0, 0.0
        else:
            dens = nx.density(g)
            dc = nx.degree_centrality(g).values()
            dc_mean, dc_max = sum(dc) / n, max(dc)
        per_page.append(dict(
            nodes=n, edges=g.number_of_edges(), density=dens,
            avg=(2 * g.number_of_edges() / n) if n else 0.0,
            clust=nx.average_clustering(g) if n else 0.0,
            dc_mean=dc_mean, dc_max=dc_max))
    k = len(per_page)
    mean = lambda key: sum(p[key] for p in per_page) / k if k else 0.0
    mx = lambda key: max((p[key] for p in per_page), default=0.0)
    return {
        "graph_node_count_total": sum(p["nodes"] for p in per_page),
        "graph_edge_count_total": sum(p["edges"] for p in per_page),
        "graph_density_mean": mean("density"),
        "graph_density_max": mx("density"),
        "graph_avg_degree_mean": mean("avg"),
        "graph_avg_degree_max": mx("avg"),
        "graph_clustering_mean": mean("clust"),
        "graph_clustering_max": mx("clust"),
        "graph_degree_centrality_mean": mean("dc_mean"),
        "graph_degree_centrality_max": mx("dc_mean"),
        "graph_degree_centrality_peak": mx("dc_max"),
    }


REGULAR_BOUNDARY = rb"[\x00\t\n\x0c\r ()<>\[\]{}/%]"


def keyword_offsets(data, word):
    pat = rb"(?:(?<=" + REGULAR_BOUNDARY + rb")|^)" + word + rb"(?=" + \
        REGULAR_BOUNDARY + rb"|$)"
    return [m.start() for m in re.finditer(pat, data)]


def struct_expect(data):
    out = {}
    for word in ["obj", "endobj", "stream", "endstream"]:
        offs = keyword_offsets(data, word.encode())
        out[f"struct_kw_{word}_count"] = len(offs)
        out[f"struct_kw_{word}_pos_min"] = min(offs, default=0)
        out[f"struct_kw_{word}_pos_max"] = max(offs, default=0)
    return out


def composition(s, prefix):
    return {
        f"{prefix}_dot": s.count("."),
        f"{prefix}_len": len(s),
        f"{prefix}_num": sum(c in "0123456789" for c in s),
        f"{prefix}_oth": sum(not (c.isascii() and c.isalnum()) for c in s),
        f"{prefix}_uc": sum("A" <= c <= "Z" for c in s),
    }


def pdf_date(s):
    m = re.fullmatch(r"D:(\d{4})(\d\d)(\d\d)(\d\d)(\d\d)(\d\d)(Z|[+-]\d\d'\d\d')?", s)
    y, mo, d, h, mi, se, tz = m.groups()
    off = dt.timedelta(0)
    if tz and tz != "Z":
        sign = 1 if tz[0] == "+" else -1
        off = sign * dt.timedelta(hours=int(tz[1:3]), minutes=int(tz[4:6]))
    local = dt.datetime(int(y), int(mo), int(d), int(h), int(mi), int(se),
                        tzinfo=dt.timezone(off))
    return local, tz == "Z"


def time_expect(creation, mod):
    out = {"time_delta_seconds": 0, "time_creation_has_z": 0, "time_mod_has_z": 0}
    c = pdf_date(creation) if creation else None
    m = pdf_date(mod) if mod else None
    if c:
        out["time_creation_has_z"] = int(c[1])
    if m:
        out["time_mod_has_z"] = int(m[1])
    if c and m:
        out["time_delta_seconds"] = abs((m[0] - c[0]).total_seconds())
    return out


def flags(*names):
    return {f"flag_{n.lower()}": int(n in names) for n in FLAG_NAMES}


def images_expect(areas):
    buckets = dict.fromkeys(["xsmall", "small", "med", "large", "xlarge"], 0)
    for a in areas:
        key = ("xsmall" if a < 1024 else "small" if a < 16384 else
               "med" if a < 262144 else "large" if a < 1048576 else "xlarge")
        buckets[key] += 1
    out = {f"count_image_{k}": v for k, v in buckets.items()}
    out["count_image_total"] = len(areas)
    out["image_totalpx"] = sum(areas)
    return out


def pdf_literal_utf16(s):
    raw = b"\xfe\xff" + s.encode("utf-16-be")
    return b"(" + raw.replace(b"\\", b"\\\\").replace(b"(", b"\\(").replace(b")", b"\\)") + b")"


def info_dict(**fields):
    parts = []
    for k, v in fields.items():
        if isinstance(v, bytes):
            parts.append(b"/" + k.encode() + b" " + v)
        else:
            esc = v.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)")
            parts.append(f"/{k} ({esc})".encode("latin-1"))
    return b"<< " + b" ".join(parts) + b" >>"


# ---------------------------------------------------------------- fixtures

FIXTURES = {}


def fixture(name, data, expect, pypdf_check=None, status="ok"):
    FIXTURES[name] = (data, expect, pypdf_check, status)


def make_all():
    # minimal benign
    pages = [["Hello world, hello PDF reader."]]
    objs, info = simple_doc(pages, info=info_dict(Title="Minimal Benign", Author="Tester"))
    data = build(objs, 1, info)
    fixture("minimal_benign.pdf", data, {
        **flags(), **graph_expect(pages), **struct_expect(data),
        **time_expect(None, None), **images_expect([]),
        **composition("Minimal Benign", "meta_title"),
        "count_page": 1, "pdf_version": 1.4, "file_size": len(data),
        "misc_is_encrypted": 0, "misc_xref_recovered": 0,
    }, dict(pages=1, title="Minimal Benign", text="Hello world"))

    # JavaScript behind OpenAction and a page additional action
    pages = [["Click anywhere to continue reading the document"]]
    objs, info = simple_doc(
        pages, catalog_extra="/OpenAction 20 0 R ", page_extra="/AA << /O 20 0 R >> ",
        extra_objects={20: b"<< /Type /Action /S /JavaScript /JS (app.alert\\('hi'\\);) >>"})
    data = build(objs, 1, info)
    fixture("js_openaction.pdf", data, {
        **flags("JS", "JavaScript", "OpenAction", "AA"), **graph_expect(pages),
        **struct_expect(data), "count_page": 1,
        "misc_freq_js": 1, "misc_freq_javascript": 1, "misc_freq_openaction": 1,
        "misc_freq_aa": 1,
        "misc_pos_first_openaction": data.index(b"/OpenAction"),
        "misc_pos_first_aa": data.index(b"/AA"),
    }, dict(pages=1, open_action_s="/JavaScript"))

    # every xref offset wrong and startxref off by three
    pages = [["recovered text survives broken tables"]]
    objs, info = simple_doc(pages, info=info_dict(Title="Broken"))
    data = build(objs, 1, info, corrupt_xref=True)
    fixture("corrupted_xref.pdf", data, {
        **flags(), **graph_expect(pages), **struct_expect(data),
        "count_page": 1, "misc_xref_recovered": 1,
        **composition("Broken", "meta_title"),
    }, dict(pages=1, title="Broken", strict=False))

    # Launch action and OpenAction only inside a compressed object stream
    content = text_content(["nothing to see here"])
    plain = {
        2: b"<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
        3: b"<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] /Contents 4 0 R >>",
        4: stream_obj("", content),
    }
    packed = {
        1: b"<< /Type /Catalog /Pages 2 0 R /OpenAction 6 0 R >>",
        6: b"<< /S /Launch /F (calc.exe) >>",
    }
    data = build_with_object_stream(plain, packed, 1)
    assert b"/Launch" not in data and b"/OpenAction" not in data
    fixture("objstm_hidden_launch.pdf", data, {
        **flags("OpenAction", "Launch"), **graph_expect([["nothing to see here"]]),
        "count_page": 1, "pdf_version": 1.5,
        "misc_freq_launch": 0, "misc_freq_openaction": 0,
        "misc_xref_stream_present": 1, "misc_object_stream_count": 1,
        "misc_objects_in_object_streams": 2,
    }, dict(pages=1, open_action_s="/Launch"))

    # UTF-16BE metadata, hex and literal
    title, author = "Grüße", "Ωmega 7.1"
    title_hex = b"<FEFF" + title.encode("utf-16-be").hex().upper().encode() + b">"
    pages = [["Metadata only"]]
    objs, info = simple_doc(pages, info=info_dict(Title=title_hex, Author=pdf_literal_utf16(author)))
    data = build(objs, 1, info)
    fixture("utf16_metadata.pdf", data, {
        **flags(), **composition(title, "meta_title"), **composition(author, "meta_author"),
        "count_page": 1,
    }, dict(pages=1, title=title, author=author))

    # dates in UTC
    c, m = "D:20230101120000Z", "D:20230102130000Z"
    pages = [["Dated in UTC"]]
    objs, info = simple_doc(pages, info=info_dict(CreationDate=c, ModDate=m))
    data = build(objs, 1, info)
    fixture("dated_utc.pdf", data, {**flags(), **time_expect(c, m), "count_page": 1},
            dict(pages=1, creation=c, mod=m))

    # dates with an explicit offset
    c, m = "D:20230615083000+02'00'", "D:20230615070000Z"
    pages = [["Dated with an offset"]]
    objs, info = simple_doc(pages, info=info_dict(CreationDate=c, ModDate=m))
    data = build(objs, 1, info)
    fixture("dated_offset.pdf", data, {**flags(), **time_expect(c, m), "count_page": 1},
            dict(pages=1, creation=c, mod=m))

    # undated, two Flate pages
    pages = [["The quick brown fox jumps over the lazy dog", "the fox again"],
             ["a b c a b c", "d"]]
    objs, info = simple_doc(pages, info=info_dict(Producer="Fixture Writer 1.0"), compress=True)
    data = build(objs, 1, info)
    fixture("undated_two_pages.pdf", data, {
        **flags(), **graph_expect(pages), **time_expect(None, None),
        **composition("Fixture Writer 1.0", "meta_producer"),
        "count_page": 2, "struct_kw_stream_count": keyword_offsets(data, b"stream").__len__(),
    }, dict(pages=2, text="quick brown fox"))

    # one 100x100 image
    img = stream_obj("/Type /XObject /Subtype /Image /Width 100 /Height 100 "
                     "/ColorSpace /DeviceGray /BitsPerComponent 8",
                     bytes(range(100)) * 100, compress=True)
    pages = [["One picture"]]
    objs, info = simple_doc(pages, resources_extra="/XObject << /Im1 20 0 R >> ",
                            extra_objects={20: img},
                            content_prefix=b"q 100 0 0 100 72 500 cm /Im1 Do Q\n")
    data = build(objs, 1, info)
    fixture("one_image.pdf", data, {
        **flags(), **images_expect([10000]), "count_page": 1,
        "pos_image_min": data.index(b"stream", data.index(b"20 0 obj")),
        "image_mismatch": 0,
    }, dict(pages=1, images=1))

    # two images: 20x20 and 600x500
    small = stream_obj("/Type /XObject /Subtype /Image /Width 20 /Height 20 "
                       "/ColorSpace /DeviceGray /BitsPerComponent 8", bytes(400), compress=True)
    large = stream_obj("/Type /XObject /Subtype /Image /Width 600 /Height 500 "
                       "/ColorSpace /DeviceGray /BitsPerComponent 8", bytes(300000), compress=True)
    pages = [["Two pictures"]]
    objs, info = simple_doc(
        pages, resources_extra="/XObject << /Im1 20 0 R /Im2 21 0 R >> ",
        extra_objects={20: small, 21: large},
        content_prefix=b"q 20 0 0 20 72 500 cm /Im1 Do Q q 600 0 0 500 0 0 cm /Im2 Do Q\n")
    data = build(objs, 1, info)
    fixture("two_images.pdf", data, {
        **flags(), **images_expect([400, 300000]), "count_page": 1, "image_mismatch": 0,
    }, dict(pages=1, images=2))

    # empty file
    fixture("zero_byte.pdf", b"", {}, None, status="failed")

    # trailer /Encrypt marker with a Standard security handler dictionary
    pages = [["Plain text behind an encryption marker"]]
    objs, info = simple_doc(pages, extra_objects={
        20: b"<< /Filter /Standard /V 1 /R 2 /O <" + b"11" * 32 + b"> /U <" + b"22" * 32
            + b"> /P -44 >>"})
    data = build(objs, 1, info, extra_trailer="/Encrypt 20 0 R /ID [<0123456789ABCDEF0123456789ABCDEF> <0123456789ABCDEF0123456789ABCDEF>] ")
    fixture("encrypted_marker.pdf", data, {
        **flags("Encrypt"), "misc_is_encrypted": 1, "count_page": 1,
        "misc_freq_encrypt": 1,
    }, dict(pages=1, encrypted=True))

    # AcroForm with XFA, and a URI link annotation
    pages = [["Fill in the form"]]
    objs, info = simple_doc(
        pages, catalog_extra="/AcroForm << /Fields [] /XFA 20 0 R >> ",
        page_extra="/Annots [21 0 R] ",
        extra_objects={
            20: stream_obj("", b"<xdp:xdp xmlns:xdp=\"http://ns.adobe.com/xdp/\"></xdp:xdp>"),
            21: b"<< /Type /Annot /Subtype /Link /Rect [0 0 10 10] "
                b"/A << /S /URI /URI (https://example.com/) >> >>",
        })
    data = build(objs, 1, info)
    fixture("acroform_uri.pdf", data, {
        **flags("URI", "AcroForm", "XFA"), "count_page": 1,
        "misc_freq_uri": 2,
    }, dict(pages=1, acroform=True))

    # embedded file through the EmbeddedFiles name tree
    pages = [["See attachment"]]
    objs, info = simple_doc(
        pages, catalog_extra="/Names << /EmbeddedFiles << /Names [(note.txt) 20 0 R] >> >> ",
        extra_objects={
            20: b"<< /Type /Filespec /F (note.txt) /EF << /F 21 0 R >> >>",
            21: stream_obj("/Type /EmbeddedFile", b"attached note\n"),
        })
    data = build(objs, 1, info)
    fixture("embedded_file.pdf", data, {
        **flags("EmbeddedFile"), "count_page": 1, "misc_embedded_file_count": 1,
    }, dict(pages=1, attachments=["note.txt"]))


# ---------------------------------------------------------------- pypdf

def cross_check(name, data, check):
    reader = PdfReader(io.BytesIO(data), strict=check.get("strict", True))
    if check.get("encrypted"):
        assert reader.is_encrypted, name
        return
    assert len(reader.pages) == check["pages"], name
    meta = reader.metadata or {}
    for key, field in [("title", "/Title"), ("author", "/Author")]:
        if key in check:
            assert meta.get(field) == check[key], (name, meta.get(field))
    for key, field in [("creation", "/CreationDate"), ("mod", "/ModDate")]:
        if key in check:
            assert meta.get(field) == check[key], (name, meta.get(field))
    if "text" in check:
        text = " ".join(p.extract_text() for p in reader.pages)
        assert check["text"] in text, (name, text)
    if "open_action_s" in check:
        action = reader.trailer["/Root"]["/OpenAction"].get_object()
        assert action["/S"] == check["open_action_s"], name
    if "images" in check:
        assert len(reader.pages[0].images) == check["images"], name
    if check.get("acroform"):
        assert "/XFA" in reader.trailer["/Root"]["/AcroForm"], name
    if "attachments" in check:
        assert list(reader.attachments) == check["attachments"], name


def main():
    make_all()
    expected = {}
    for name, (data, expect, check, status) in FIXTURES.items():
        (HERE / name).write_bytes(data)
        if check is not None:
            cross_check(name, data, check)
        expected[name] = {"status": status, "columns": expect}
    (HERE / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(FIXTURES)} fixtures")


if __name__ == "__main__":
    main()
