"""
Configurações centralizadas da aplicação.
Todas as constantes e parâmetros configuráveis devem estar aqui.
"""

from pathlib import Path
from typing import Final

# ============================================================================
# Ingestão
# ============================================================================
GIT_LOG_RECORD_SEPARATOR: Final[str] = "@@@"  # Linha que separa commits no git_log
GIT_LOG_HEADER_FIELDS: Final[int] = 4  # sha|nome|email|data
MAX_MALFORMED_RATIO: Final[float] = 0.10  # Acima disso o formato está errado
MAX_FILE_SIZE_MB: Final[int] = 1000  # Limite de 1GB por arquivo de entrada

# Padrões de arquivos de documentação (case-insensitive, estilo glob)
DEFAULT_DOC_PATTERNS: Final[tuple[str, ...]] = (
    "*.md",
    "*.rst",
    "*.txt",
    "*.adoc",
    "docs/**",
    "doc/**",
    "LICENSE*",
    "CHANGELOG*",
)

# ============================================================================
# Eventos de colaboração
# ============================================================================
# Tipos que acontecem COM o desenvolvedor, não POR ele
PASSIVE_KINDS: Final[frozenset[str]] = frozenset(
    {"mention_received", "assignment_received", "other_passive"}
)

# Tabela forge -> kind. Chaves "Tipo:acao" têm prioridade sobre "Tipo".
FORGE_EVENT_KINDS: Final[dict[str, str]] = {
    # Pull requests: ações sem entrada própria são desconhecidas (passivas)
    "PullRequestEvent:opened": "pr_opened",
    "PullRequestEvent:reopened": "pr_opened",
    "PullRequestEvent:closed": "issue_action_active",
    "PullRequestEvent:edited": "issue_action_active",
    "PullRequestEvent:labeled": "issue_action_active",
    "PullRequestEvent:unlabeled": "issue_action_active",
    # Commits enviados ao PR já entram pelo log de commits
    "PullRequestEvent:synchronize": "issue_action_active",
    "PullRequestEvent:ready_for_review": "issue_action_active",
    "PullRequestEvent:converted_to_draft": "issue_action_active",
    "PullRequestEvent:assigned": "assignment_received",
    "PullRequestEvent:unassigned": "assignment_received",
    "PullRequestEvent:review_requested": "assignment_received",
    "PullRequestEvent:review_request_removed": "assignment_received",
    "PullRequestReviewEvent": "pr_comment",
    "PullRequestReviewCommentEvent": "pr_comment",
    "PullRequestReviewThreadEvent": "pr_comment",
    # Issues
    "IssuesEvent": "issue_action_active",
    "IssuesEvent:opened": "issue_opened",
    "IssuesEvent:reopened": "issue_action_active",
    "IssuesEvent:closed": "issue_action_active",
    "IssuesEvent:labeled": "issue_action_active",
    "IssuesEvent:unlabeled": "issue_action_active",
    "IssuesEvent:assigned": "assignment_received",
    "IssuesEvent:unassigned": "assignment_received",
    "IssueCommentEvent": "issue_comment",
    "CommitCommentEvent": "pr_comment",
    # Linha do tempo de issues/PRs (eventos passivos)
    "mentioned": "mention_received",
    "assigned": "assignment_received",
    "unassigned": "assignment_received",
    "subscribed": "other_passive",
    "review_requested": "assignment_received",
    # Ruído de API
    "WatchEvent": "other_passive",
    "ForkEvent": "other_passive",
    "MemberEvent": "other_passive",
    "PublicEvent": "other_passive",
}

# ============================================================================
# Identificação de core developers
# ============================================================================
CBH_THRESHOLD: Final[float] = 0.8  # 80% dos commits

# Modelo de grau de autoria (DOA)
DOA_INTERCEPT: Final[float] = 3.293
DOA_FIRST_AUTHOR: Final[float] = 1.098
DOA_DELIVERIES: Final[float] = 0.164
DOA_ACCEPTANCES: Final[float] = 0.321
DOA_NORMALIZED_MIN: Final[float] = 0.75  # Estritamente maior
DOA_ABSOLUTE_MIN: Final[float] = 3.293  # Maior ou igual
TF_ORPHAN_SHARE: Final[float] = 0.5  # Estritamente maior que metade dos arquivos

# ============================================================================
# Detector de ritmo (janela deslizante)
# ============================================================================
WINDOW_MONTHS: Final[int] = 3
SHIFT_DAYS: Final[int] = 7
MIN_PAUSES_PER_WINDOW: Final[int] = 4
IQR_FLOOR_DAYS: Final[int] = 1
FAR_OUT_MULTIPLIER: Final[int] = 3
SENSITIVITY_WINDOWS: Final[tuple[int, ...]] = (1, 3, 4, 6, 12)

# ============================================================================
# Ciclo de vida
# ============================================================================
GONE_DAYS: Final[int] = 365  # 12 meses sem atividade

# ============================================================================
# Estatística
# ============================================================================
WILCOXON_EXACT_MAX_N: Final[int] = 25  # Acima disso, aproximação normal
ALPHA: Final[float] = 0.05
HALDANE_CORRECTION: Final[float] = 0.5
LOGIT_AGREEMENT_TOL: Final[float] = 1e-6

# Magnitude do delta de Cliff
CLIFF_NEGLIGIBLE: Final[float] = 0.147
CLIFF_SMALL: Final[float] = 0.33
CLIFF_MEDIUM: Final[float] = 0.474

# ============================================================================
# Cache
# ============================================================================
CACHE_FORMAT_VERSION: Final[int] = 1
CACHE_MANIFEST: Final[str] = "manifest.json"
CACHE_TIMELINES_DIR: Final[str] = "timelines"
CACHE_COMMITS_FILE: Final[str] = "commits.jsonl"

# ============================================================================
# Caminhos padrão
# ============================================================================
BASE_DIR: Final[Path] = Path(__file__).resolve().parent.parent
OUTPUT_DIR: Final[Path] = BASE_DIR / "output"

# ============================================================================
# Forge (fetcher mínimo)
# ============================================================================
FORGE_API_URL: Final[str] = "https://api.github.com"
FORGE_TIMEOUT_SECONDS: Final[int] = 30
