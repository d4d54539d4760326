import os
import sys

import uvicorn

# Serve the ASGI application from the backend directory
os.chdir('backend')
sys.path.insert(0, os.getcwd())
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'server.settings')

if __name__ == '__main__':
    uvicorn.run('server.asgi:application', host='0.0.0.0', port=8000)
