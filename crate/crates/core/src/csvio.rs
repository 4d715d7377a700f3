//! Small helpers around the `csv` crate shared by every table format.

use csv::{ReaderBuilder, StringRecord, Writer, WriterBuilder};

use crate::error::{Error, Result};

pub(crate) fn reader(text: &str, allow_comments: bool) -> csv::Reader<&[u8]> {
    ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::None)
        .comment(if allow_comments { Some(b'#') } else { None })
        .from_reader(text.as_bytes())
}

pub(crate) fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    Error::parse(line, "<row>", err.to_string())
}

/// Requires the header to be exactly `expected`, in order.
pub(crate) fn expect_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let found = rdr.headers().map_err(csv_error)?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

pub(crate) fn line_of(record: &StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

pub(crate) fn field<'r>(record: &'r StringRecord, index: usize, name: &str) -> Result<&'r str> {
    record
        .get(index)
        .ok_or_else(|| Error::parse(line_of(record), name, "missing field"))
}

pub(crate) fn writer() -> Writer<Vec<u8>> {
    WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn finish(w: Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: std::io::Error::other(e.to_string()),
        })
}

pub(crate) fn write_row<I, S>(w: &mut Writer<Vec<u8>>, fields: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).map_err(|e| Error::Io {
        path: "<memory>".into(),
        source: std::io::Error::other(e.to_string()),
    })
}
