//! Byte decoding shared by the XML-based parsers.

use encoding_rs::Encoding;

/// Decodes raw bytes using the BOM, then the XML declaration's encoding, then UTF-8.
pub(crate) fn decode_xml(bytes: &[u8]) -> Result<String, String> {
    if let Some((enc, bom_len)) = Encoding::for_bom(bytes) {
        return decode_with(enc, &bytes[bom_len..]);
    }
    let enc = declared_encoding(bytes)
        .and_then(|label| Encoding::for_label(label.as_bytes()))
        .unwrap_or(encoding_rs::UTF_8);
    decode_with(enc, bytes)
}

fn decode_with(enc: &'static Encoding, bytes: &[u8]) -> Result<String, String> {
    let (text, had_errors) = enc.decode_without_bom_handling(bytes);
    if had_errors {
        return Err(format!("invalid {} byte sequence", enc.name()));
    }
    Ok(text.into_owned())
}

fn declared_encoding(bytes: &[u8]) -> Option<String> {
    let head = &bytes[..bytes.len().min(200)];
    let head = std::str::from_utf8(head)
        .ok()
        .or_else(|| std::str::from_utf8(&head[..head.iter().position(|b| *b > 0x7f)?]).ok())?;
    let decl = head.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let pos = decl.find("encoding")?;
    let rest = decl[pos + "encoding".len()..].trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let rest = &rest[1..];
    Some(rest[..rest.find(quote)?].to_string())
}

/// Local part of a possibly prefixed name (`archimate:BusinessActor` → `BusinessActor`).
pub(crate) fn local(name: &str) -> &str {
    name.rsplit_once(':').map_or(name, |(_, l)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honours_declared_latin1() {
        let mut bytes = b"<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?><a n=\"".to_vec();
        bytes.push(0xE4);
        bytes.extend_from_slice(b"\"/>");
        let text = decode_xml(&bytes).unwrap();
        assert!(text.contains("n=\"\u{e4}\""));
    }

    #[test]
    fn utf8_default_and_bom() {
        assert_eq!(decode_xml("<a>ü</a>".as_bytes()).unwrap(), "<a>ü</a>");
        let mut bom = vec![0xEF, 0xBB, 0xBF];
        bom.extend_from_slice(b"<a/>");
        assert_eq!(decode_xml(&bom).unwrap(), "<a/>");
        assert!(decode_xml(&[0x3c, 0xff, 0xfe, 0x3e, 0x80]).is_err());
    }

    #[test]
    fn local_names() {
        assert_eq!(local("archimate:BusinessActor"), "BusinessActor");
        assert_eq!(local("EClass"), "EClass");
    }
}
