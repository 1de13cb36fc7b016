"""Regenerates the zip fixtures. Run from this directory."""
import zipfile

SRT = b"1\n00:00:01,000 --> 00:00:05,000\nHello World\n\n"

with zipfile.ZipFile("benign/subs.zip", "w", zipfile.ZIP_DEFLATED) as z:
    z.writestr("en/movie.srt", SRT)
    z.writestr("fr/movie.srt", "1\n00:00:01,000 --> 00:00:05,000\nBonjour à tous\n\n".encode())

# Folders named ".." nest until the path climbs out of the extraction root
# and lands on the subtitle plugin.
with zipfile.ZipFile("malicious/traversal.zip", "w", zipfile.ZIP_DEFLATED) as z:
    z.writestr("Subtitles.srt", SRT)
    z.writestr("../../../../../home/user/.kodi/addons/service.subtitles.opensubtitles/service.py",
               b"import os\n# replaced plugin\n")
