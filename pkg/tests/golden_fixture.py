"""Hand-computed feature oracle: one review comment whose 25 scalars were
worked out on paper.

Message: "This cast truncates `user_id`; please use parse_long() instead.
Is overflow handled?"

  tokens (11): this cast truncates user_id please use parse_long instead
               is overflow handled
  sentences: 2, one terminated by "?"          -> question_ratio 0.5
  code tokens: user_id, parse_long (snake_case) plus "this", a reserved
               word in several languages       -> code elements 3, ratio 3/11
  stopword hits: this, is                      -> stop_word_ratio 2/11
  syllables: 1+1+3+3+1+1+3+2+1+3+2 = 21
  readability: 206.835 - 1.015*(11/2) - 84.6*(21/11) = 39.7434
  no sentiment terms                           -> comment_sentiment 0

Thread: root by rev at T0+10h on patchset 1 (uploaded T0), author replies
"Done, thanks!" at +20h (confirmatory, gratitude, positive), rev closes
with "agreed" at +30h. Patchset 2 (T0+48h) edits ui.py line 12, two lines
from the thread's line 10. Change is merged with 3 patchsets.

History before the comment: rev reviewed one earlier ui.py change and
authored another; auth authored one prior change, and the change under
review itself also counts toward auth's project experience.
"""

from datetime import datetime, timedelta, timezone

from reviewlens.ingest.dump import ReviewDump
from reviewlens.model import (
    ChangeStatus,
    CommentThread,
    Developer,
    FileDiff,
    Patchset,
    Project,
    ReviewChange,
    ReviewComment,
)

T0 = datetime(2025, 3, 1, tzinfo=timezone.utc)

GOLDEN_TEXT = "This cast truncates `user_id`; please use parse_long() instead. Is overflow handled?"

EXPECTED = {
    "comment_sentiment": 0.0,
    "question_ratio": 0.5,
    "code_element_number": 3.0,
    "code_element_ratio": 3.0 / 11.0,
    "similarity": 0.0,            # no stored code context
    "readability": 39.7434,      # +/- 0.01
    "word_count": 11.0,
    "stop_word_ratio": 2.0 / 11.0,
    "author_responded": 1.0,
    "review_interval": 36000.0,  # 10 h in seconds
    "patch_id": 1.0,
    "num_patches": 3.0,
    "change_trigger": 1.0,
    "line_change": 2.0,
    "confirmatory_response": 1.0,
    "gratitude": 1.0,
    "reply_sentiment": 1.0,
    "is_last_patch": 0.0,
    "thread_length": 3.0,
    "num_participant": 2.0,
    "review_status": 1.0,        # merged
    "code_reviewership": 1.0,
    "code_ownership": 1.0,
    "reviewing_experience": 1.0,
    "developer_experience": 2.0,
}


def build_golden():
    """Returns (root_comment, change_under_review, dump)."""
    devs = {d: Developer(d, d.capitalize()) for d in ("rev", "auth", "other")}
    projects = {"proj": Project("proj", "Proj")}

    root = ReviewComment(
        comment_id="gold-c", thread_id="gold-t", author_id="rev",
        written_at=T0 + timedelta(hours=10), text=GOLDEN_TEXT, patchset_number=1,
    )
    reply = ReviewComment(
        comment_id="gold-r1", thread_id="gold-t", author_id="auth",
        written_at=T0 + timedelta(hours=20), text="Done, thanks!", patchset_number=1,
    )
    closing = ReviewComment(
        comment_id="gold-r2", thread_id="gold-t", author_id="rev",
        written_at=T0 + timedelta(hours=30), text="agreed", patchset_number=1,
    )
    thread = CommentThread(thread_id="gold-t", file_path="ui.py", line=10,
                           origin_patchset=1, comments=(root, reply, closing))
    change = ReviewChange(
        change_id="gold-chg", project_id="proj", author_id="auth",
        created_at=T0, status=ChangeStatus.MERGED,
        patchsets=(
            Patchset(number=1, uploaded_at=T0,
                     files=(FileDiff("ui.py", frozenset({10, 40})),)),
            Patchset(number=2, uploaded_at=T0 + timedelta(hours=48),
                     files=(FileDiff("ui.py", frozenset({12})),)),
            Patchset(number=3, uploaded_at=T0 + timedelta(hours=96),
                     files=(FileDiff("core.py", frozenset({5})),)),
        ),
        threads=(thread,),
    )

    def prior(cid, author, days_ago, path, commenter=None):
        at = T0 - timedelta(days=days_ago)
        threads = ()
        if commenter:
            c = ReviewComment(comment_id=f"{cid}-c", thread_id=f"{cid}-t",
                              author_id=commenter, written_at=at + timedelta(hours=4),
                              text="hm", patchset_number=1)
            threads = (CommentThread(thread_id=f"{cid}-t", file_path=path, line=1,
                                     origin_patchset=1, comments=(c,)),)
        return ReviewChange(
            change_id=cid, project_id="proj", author_id=author, created_at=at,
            status=ChangeStatus.MERGED,
            patchsets=(Patchset(number=1, uploaded_at=at,
                                files=(FileDiff(path, frozenset({1})),)),),
            threads=threads,
        )

    history = (
        prior("hA", "other", 30, "ui.py", commenter="rev"),
        prior("hB", "rev", 20, "ui.py"),
        prior("hC", "auth", 10, "core.py"),
    )
    dump = ReviewDump(
        developers=devs, projects=projects,
        changes=history + (change,), code_contexts={},
        format_version=1,
    )
    return root, change, dump
