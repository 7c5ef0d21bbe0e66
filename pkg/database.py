import argparse
import sqlite3
from datetime import datetime
from contextlib import contextmanager
import json
import logging
from config import Config
from cohomology import CohomologyTable

logger = logging.getLogger(__name__)


class Database:
    """SQLite store for computed cohomology tables"""

    def __init__(self, db_path=None):
        self.db_path = db_path or Config.DATABASE_PATH

    @contextmanager
    def get_connection(self):
        """Context manager for database connections"""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        except Exception as e:
            conn.rollback()
            raise e
        finally:
            conn.close()

    def initialize(self):
        """Create all database tables"""
        with self.get_connection() as conn:
            cursor = conn.cursor()

            # Cohomology cache table
            cursor.execute('''
                CREATE TABLE IF NOT EXISTS cohomology_cache (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    fan_fingerprint TEXT NOT NULL,
                    fan_name TEXT,
                    coeffs_json TEXT NOT NULL,
                    dims_json TEXT NOT NULL,
                    ledger_json TEXT,
                    computed_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    UNIQUE(fan_fingerprint, coeffs_json)
                )
            ''')

            # Create indexes for performance
            cursor.execute('CREATE INDEX IF NOT EXISTS idx_cohomology_cache_fan ON cohomology_cache(fan_fingerprint)')

    # Cohomology cache operations
    def cache_cohomology(self, fan, coeffs, table):
        """Cache a cohomology table for one representation on a fan"""
        data = table.to_dict()
        with self.get_connection() as conn:
            cursor = conn.cursor()
            # every writer of a key computes the same table
            cursor.execute('''
                INSERT INTO cohomology_cache
                (fan_fingerprint, fan_name, coeffs_json, dims_json, ledger_json, computed_at)
                VALUES (?, ?, ?, ?, ?, ?)
                ON CONFLICT(fan_fingerprint, coeffs_json) DO UPDATE SET
                    fan_name = excluded.fan_name,
                    dims_json = excluded.dims_json,
                    ledger_json = excluded.ledger_json,
                    computed_at = excluded.computed_at
            ''', (
                fan.fingerprint(),
                fan.name,
                json.dumps(list(coeffs)),
                json.dumps(data['dims']),
                json.dumps(data['ledger']),
                datetime.now().isoformat(),
            ))

    def get_cached_cohomology(self, fan, coeffs):
        """Get a cached cohomology table, or None"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute('''
                SELECT dims_json, ledger_json FROM cohomology_cache
                WHERE fan_fingerprint = ? AND coeffs_json = ?
            ''', (fan.fingerprint(), json.dumps(list(coeffs))))

            row = cursor.fetchone()
            if not row:
                return None
            logger.debug("Cohomology cache hit for %s on '%s'", tuple(coeffs), fan)
            return CohomologyTable.from_dict({
                'dims': json.loads(row['dims_json']),
                'ledger': json.loads(row['ledger_json'] or '[]'),
            })

    def count_cached(self):
        """Number of cached tables"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute('SELECT COUNT(*) FROM cohomology_cache')
            return cursor.fetchone()[0]

    def clear(self):
        """Remove every cached table"""
        with self.get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute('DELETE FROM cohomology_cache')


# Global database instance
db = Database()


def init_db():
    """Initialize the database"""
    db.initialize()
    logger.info("Database initialized at %s", db.db_path)


def main(argv=None):
    parser = argparse.ArgumentParser(description='Create, inspect or clear the cohomology cache.')
    parser.add_argument('--clear', action='store_true', help='Remove every cached table')
    args = parser.parse_args(argv)

    logging.basicConfig(level=Config.LOG_LEVEL)
    init_db()
    if args.clear:
        db.clear()
        logger.info("Cache cleared")
    print(f"{db.count_cached()} cached cohomology tables in {db.db_path}")
    return 0


if __name__ == '__main__':
    main()
